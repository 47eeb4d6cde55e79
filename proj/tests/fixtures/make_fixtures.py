#!/usr/bin/env python3
"""Regenerates the synthetic fixtures in this directory. Output is deterministic."""
import json
import math
from pathlib import Path

HERE = Path(__file__).resolve().parent

LIGAND = [  # name, element, xyz, charge
    ("C1", "C", (1.390, 0.000, 0.0), 0),
    ("C2", "C", (0.695, 1.204, 0.0), 0),
    ("C3", "C", (-0.695, 1.204, 0.0), 0),
    ("C4", "C", (-1.390, 0.000, 0.0), 0),
    ("C5", "C", (-0.695, -1.204, 0.0), 0),
    ("C6", "C", (0.695, -1.204, 0.0), 0),
    ("C7", "C", (2.890, 0.000, 0.0), 0),
    ("O8", "O", (3.510, 1.070, 0.0), 0),
    ("O9", "O", (3.510, -1.070, 0.0), -1),
    ("O10", "O", (-2.750, 0.000, 0.0), 0),
]
BONDS = [(1, 2, 2), (2, 3, 1), (3, 4, 2), (4, 5, 1), (5, 6, 2), (6, 1, 1), (1, 7, 1), (7, 8, 2), (7, 9, 1), (4, 10, 1)]

ZINC_SITES = [(-3.0, 5.5, 1.0), (4.0, -5.5, -1.0)]


def norm(v):
    n = math.sqrt(sum(c * c for c in v))
    return tuple(c / n for c in v)


def add(a, b, s=1.0):
    return tuple(x + s * y for x, y in zip(a, b))


def perpendicular(u):
    t = (0.0, 0.0, 1.0) if abs(u[2]) < 0.9 else (1.0, 0.0, 0.0)
    p = (u[1] * t[2] - u[2] * t[1], u[2] * t[0] - u[0] * t[2], u[0] * t[1] - u[1] * t[0])
    return norm(p)


def line_residue(names, tip, direction):
    """Atoms laid out from the tip outwards, 1.5 A apart with a small zigzag."""
    u = norm(direction)
    p = perpendicular(u)
    out = []
    for k, name in enumerate(names):
        pos = add(add(tip, u, 1.5 * k), p, 0.5 if k % 2 else 0.0)
        out.append((name, name[0], pos))
    return out


def phe_above(center, z):
    names = ["CG", "CD1", "CE1", "CZ", "CE2", "CD2"]
    atoms = []
    for k, name in enumerate(names):
        a = math.radians(60 * k)
        atoms.append((name, "C", (center[0] + 1.39 * math.cos(a), center[1] + 1.39 * math.sin(a), z)))
    cg = atoms[0][2]
    for k, name in enumerate(["CB", "CA", "N", "C", "O"]):
        atoms.append((name, name[0], (cg[0] + 0.4 * (k % 2), cg[1], z + 1.5 * (k + 1))))
    return atoms


def protein_residues():
    return [
        ("LYS", 1, line_residue(["NZ", "CE", "CD", "CG", "CB", "CA", "N", "C", "O"], (6.0, 0.0, 0.0), (1, 0, 0))),
        ("SER", 2, line_residue(["OG", "CB", "CA", "N", "C", "O"], (-5.5, 0.6, 0.0), (-1, 0.1, 0))),
        ("PHE", 3, phe_above((0.3, 0.2), 3.7)),
        ("LEU", 4, line_residue(["CD1", "CG", "CD2", "CB", "CA", "N", "C", "O"], (0.8, 4.8, 0.0), (0, 1, 0))),
        ("GLY", 5, line_residue(["CA", "N", "C", "O"], (-0.7, -4.6, 0.0), (0, -1, 0))),
        ("ALA", 6, line_residue(["CB", "CA", "N", "C", "O"], (0.0, 0.0, -7.5), (0, 0, -1))),
        ("VAL", 7, line_residue(["CG1", "CB", "CG2", "CA", "N", "C", "O"], (0.0, 15.0, 0.0), (0, 1, 0))),
        ("ILE", 8, line_residue(["CD1", "CG1", "CB", "CG2", "CA", "N", "C", "O"], (15.0, 2.0, 0.0), (1, 0, 0))),
        ("GLU", 9, line_residue(["OE1", "CD", "OE2", "CG", "CB", "CA", "N", "C", "O"], (-14.0, 5.0, 0.0), (-1, 0, 0))),
        ("THR", 10, line_residue(["OG1", "CB", "CG2", "CA", "N", "C", "O"], (5.0, -14.0, 3.0), (0, -1, 0))),
        ("ASN", 11, line_residue(["ND2", "CG", "OD1", "CB", "CA", "N", "C", "O"], (-6.0, -9.0, -4.0), (-1, -1, 0))),
    ]


WATER = ("HOH", 101, [("O", "O", (0.0, -3.5, 2.5))])


def rotation(deg_z, deg_x):
    cz, sz = math.cos(math.radians(deg_z)), math.sin(math.radians(deg_z))
    cx, sx = math.cos(math.radians(deg_x)), math.sin(math.radians(deg_x))
    rz = ((cz, -sz, 0), (sz, cz, 0), (0, 0, 1))
    rx = ((1, 0, 0), (0, cx, -sx), (0, sx, cx))
    return tuple(tuple(sum(rz[i][k] * rx[k][j] for k in range(3)) for j in range(3)) for i in range(3))


def transform(p, rot, shift):
    return tuple(sum(rot[i][j] * p[j] for j in range(3)) + shift[i] for i in range(3))


IDENTITY = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
MOTION = (rotation(40.0, 25.0), (10.0, -5.0, 3.0))


def pdb_name(name, element):
    return f" {name:<3s}" if len(element) == 1 and len(name) < 4 else f"{name:<4s}"


def pdb_line(record, serial, name, element, res, chain, seq, xyz, charge=0):
    ch = "" if charge == 0 else f"{abs(charge)}{'+' if charge > 0 else '-'}"
    return (f"{record:<6s}{serial:5d} {pdb_name(name, element)} {res:>3s} {chain}{seq:4d}    "
            f"{xyz[0]:8.3f}{xyz[1]:8.3f}{xyz[2]:8.3f}  1.00  0.00          {element:>2s}{ch:2s}")


def protein_pdb(rot=IDENTITY, shift=(0, 0, 0), ligand=None, title="synthetic pocket"):
    lines = [f"TITLE     {title}"]
    serial = 1
    for res, seq, atoms in protein_residues():
        for name, el, xyz in atoms:
            lines.append(pdb_line("ATOM", serial, name, el, res, "A", seq, transform(xyz, rot, shift)))
            serial += 1
    res, seq, atoms = WATER
    for name, el, xyz in atoms:
        lines.append(pdb_line("HETATM", serial, name, el, res, "A", seq, transform(xyz, rot, shift)))
        serial += 1
    for name, el, xyz, charge in ligand or []:
        lines.append(pdb_line("HETATM", serial, name, el, "LIG", "B", 1, xyz, charge))
        serial += 1
    lines.append("END")
    return "\n".join(lines) + "\n"


def sdf_record(name, atoms, bonds):
    out = [name, "  synthetic", ""]
    out.append(f"{len(atoms):3d}{len(bonds):3d}  0  0  0  0  0  0  0  0999 V2000")
    for _, el, xyz, _ in atoms:
        out.append(f"{xyz[0]:10.4f}{xyz[1]:10.4f}{xyz[2]:10.4f} {el:<3s} 0  0  0  0  0  0  0  0  0  0  0  0")
    for a, b, t in bonds:
        out.append(f"{a:3d}{b:3d}{t:3d}  0")
    charged = [(i + 1, c) for i, (_, _, _, c) in enumerate(atoms) if c != 0]
    if charged:
        out.append(f"M  CHG{len(charged):3d}" + "".join(f"{i:4d}{c:4d}" for i, c in charged))
    out.append("M  END")
    out.append("$$$$")
    return "\n".join(out) + "\n"


def ligand_atoms(rot=IDENTITY, shift=(0, 0, 0), offset=(0, 0, 0)):
    return [(n, el, transform(add(xyz, offset), rot, shift), c) for n, el, xyz, c in LIGAND]


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def reordered(atoms, bonds, order):
    """Atoms listed in `order` (old 0-based indices); bonds renumbered."""
    new_index = {old: k + 1 for k, old in enumerate(order)}
    return [atoms[o] for o in order], [(new_index[a - 1], new_index[b - 1], t) for a, b, t in bonds]


def zinc(xyz, rot=IDENTITY, shift=(0, 0, 0)):
    return [("ZN", "Zn", transform(xyz, rot, shift), 2)]


def main():
    rot, shift = MOTION
    write(HERE / "ref" / "protein.pdb", protein_pdb())
    write(HERE / "ref" / "ligand.sdf", sdf_record("hydroxybenzoate", ligand_atoms(), BONDS))
    write(HERE / "ref" / "zinc.sdf", "".join(sdf_record(f"zinc{k}", zinc(z), []) for k, z in enumerate(ZINC_SITES)))

    pred = HERE / "pred"
    write(pred / "protein.pdb", protein_pdb(rot, shift, title="moved pocket"))
    # fx1: rigidly moved copy of the reference.
    write(pred / "fx1_ligand.sdf", sdf_record("fx1", ligand_atoms(rot, shift), BONDS))
    # fx2: ligand displaced 2.5 A along -z before the motion.
    write(pred / "fx2_ligand.sdf", sdf_record("fx2", ligand_atoms(rot, shift, (0, 0, -2.5)), BONDS))
    # fx3: ring flipped and carboxylate oxygens exchanged, in a complex PDB with shuffled atom order.
    moved = ligand_atoms(rot, shift)
    flip = {1: 5, 5: 1, 2: 4, 4: 2, 7: 8, 8: 7}
    flipped = [(n, el, moved[flip.get(i, i)][2], c) for i, (n, el, _, c) in enumerate(moved)]
    order = [9, 3, 0, 7, 5, 1, 8, 6, 2, 4]
    shuffled = [flipped[o] for o in order]
    write(pred / "fx3_complex.pdb", protein_pdb(rot, shift, ligand=shuffled, title="flipped ligand"))
    # multi: ligand plus two zinc ions predicted in swapped sites, one multi-record SDF.
    ions = zinc(ZINC_SITES[1], rot, shift) + zinc(ZINC_SITES[0], rot, shift)
    write(pred / "mx1_ligands.sdf",
          sdf_record("mx1", ligand_atoms(rot, shift), BONDS) + sdf_record("zn_a", [ions[0]], []) +
          sdf_record("zn_b", [ions[1]], []))

    entries = [
        {"target_id": "fx1", "mode": "primary", "ref_protein_path": "ref/protein.pdb",
         "ref_ligand_paths": ["ref/ligand.sdf"], "primary_ligand_index": 0,
         "predicted_complex_paths": [{"protein": "pred/protein.pdb", "ligands": ["pred/fx1_ligand.sdf"]}],
         "smiles": ["OC(=O)c1ccc(O)cc1"], "annotation": "hydrolase"},
        {"target_id": "fx2", "mode": "primary", "ref_protein_path": "ref/protein.pdb",
         "ref_ligand_paths": ["ref/ligand.sdf"], "primary_ligand_index": 0,
         "predicted_complex_paths": [{"protein": "pred/protein.pdb", "ligands": ["pred/fx2_ligand.sdf"]}],
         "annotation": "oxidoreductase"},
        {"target_id": "fx3", "mode": "primary", "ref_protein_path": "ref/protein.pdb",
         "ref_ligand_paths": ["ref/ligand.sdf"], "primary_ligand_index": 0,
         "predicted_complex_paths": ["pred/fx3_complex.pdb"]},
    ]
    write(HERE / "manifest.jsonl", "".join(json.dumps(e) + "\n" for e in entries))

    multi = {"target_id": "mx1", "mode": "multi", "ref_protein_path": "ref/protein.pdb",
             "ref_ligand_paths": ["ref/ligand.sdf", "ref/zinc.sdf"],
             "predicted_complex_paths": [{"protein": "pred/protein.pdb", "ligands": ["pred/mx1_ligands.sdf"]}]}
    write(HERE / "multi_manifest.jsonl", json.dumps(multi) + "\n")

    shaped = HERE / "shaped"
    def shaped_entry(tid, mode, n_ligands):
        e = {"target_id": tid, "mode": mode, "ref_protein_path": f"{tid}/protein.pdb",
             "ref_ligand_paths": [f"{tid}/ligand{k}.sdf" for k in range(n_ligands)],
             "predicted_complex_paths": [f"{tid}/run{r}.pdb" for r in range(3)]}
        if mode == "primary":
            e["primary_ligand_index"] = 0
        return e

    casp = [shaped_entry(f"T{1100 + k}", "primary", 1) for k in range(6)]
    multi_sizes = [7] * 12 + [12]  # 96 fragments across 13 multi-ligand complexes
    casp += [shaped_entry(f"T{1200 + k}", "multi", n) for k, n in enumerate(multi_sizes)]
    write(shaped / "casp15.jsonl", "".join(json.dumps(e) + "\n" for e in casp))
    for name, n in [("astex", 85), ("dockgen-e", 122), ("posebusters", 130)]:
        write(shaped / f"{name}.jsonl",
              "".join(json.dumps(shaped_entry(f"{name[:2]}{k:04d}", "primary", 1)) + "\n" for k in range(n)))


if __name__ == "__main__":
    main()
