"""Mesh, pair-file and report serialization.

OBJ (polygonal v/f records) and OFF carry single meshes; a pair file is a
single JSON document carrying both meshes of a parallel pair, which is the
only way to guarantee shared combinatorics on disk. All numeric output is
printed with 17 significant digits so write -> parse round-trips are exact
for float64, and serialization is deterministic (sorted keys, fixed float
formatting) so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np

from .curvature import all_face_curvatures, edge_curvatures
from .errors import ParseError, UnsupportedElement
from .meshes import Mesh, ParallelPair, build_combinatorics, face_planarity

FLOAT_FORMAT = ".17g"

# OBJ element keywords that carry no geometry we use; silently skipped
_OBJ_IGNORED = {"vt", "vn", "vp", "g", "o", "s", "usemtl", "mtllib"}


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x}")
    out = format(float(x), FLOAT_FORMAT)
    return out


# --- OBJ ----------------------------------------------------------------------

def _parse_obj(lines) -> tuple[list, list]:
    verts: list[list[float]] = []
    faces: list[list[int]] = []
    for ln, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "v":
            if len(parts) < 4:
                raise ParseError("vertex needs 3 coordinates", line=ln)
            try:
                verts.append([float(p) for p in parts[1:4]])
            except ValueError as exc:
                raise ParseError(f"bad vertex coordinate: {exc}", line=ln) from exc
        elif kind == "f":
            if len(parts) < 4:
                raise ParseError("face needs at least 3 vertices", line=ln)
            cycle = []
            for token in parts[1:]:
                idx_txt = token.split("/", 1)[0]
                try:
                    idx = int(idx_txt)
                except ValueError as exc:
                    raise ParseError(f"bad face index {token!r}", line=ln) from exc
                if idx == 0:
                    raise ParseError("OBJ indices are 1-based, got 0", line=ln)
                if idx < 0:
                    idx = len(verts) + idx  # relative to the vertices so far
                else:
                    idx = idx - 1
                if idx < 0 or idx >= len(verts):
                    raise ParseError(f"face index {token} out of range", line=ln)
                cycle.append(idx)
            faces.append(cycle)
        elif kind in _OBJ_IGNORED:
            continue
        else:
            raise UnsupportedElement(f"unsupported OBJ element {kind!r}", line=ln)
    return verts, faces


def _write_obj(mesh: Mesh, fh) -> None:
    for v in mesh.positions:
        fh.write(f"v {_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}\n")
    for cyc in mesh.combinatorics.faces:
        fh.write("f " + " ".join(str(i + 1) for i in cyc) + "\n")


# --- OFF ----------------------------------------------------------------------

def _parse_off(lines) -> tuple[list, list]:
    content = []
    for ln, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            content.append((ln, line))
    if not content:
        raise ParseError("empty OFF file", line=1)
    ln0, header = content[0]
    body = content[1:]
    if header != "OFF":
        if header.split()[0] == "OFF":  # counts on the header line
            body = [(ln0, header[3:].strip())] + body
        else:
            raise ParseError("missing OFF header", line=ln0)
    if not body:
        raise ParseError("missing OFF counts", line=ln0)
    ln1, counts = body[0]
    parts = counts.split()
    if len(parts) < 3:
        raise ParseError("OFF counts need nV nF nE", line=ln1)
    try:
        nv, nf = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ParseError(f"bad OFF counts: {exc}", line=ln1) from exc
    rows = body[1:]
    if len(rows) != nv + nf:
        raise ParseError(
            f"OFF body has {len(rows)} rows, expected {nv} vertices + {nf} faces",
            line=ln1,
        )
    verts = []
    for ln, line in rows[:nv]:
        parts = line.split()
        if len(parts) < 3:
            raise ParseError("OFF vertex needs 3 coordinates", line=ln)
        try:
            verts.append([float(p) for p in parts[:3]])
        except ValueError as exc:
            raise ParseError(f"bad OFF vertex: {exc}", line=ln) from exc
    faces = []
    for ln, line in rows[nv:]:
        parts = line.split()
        try:
            k = int(parts[0])
            cycle = [int(p) for p in parts[1 : 1 + k]]
        except (ValueError, IndexError) as exc:
            raise ParseError(f"bad OFF face row: {exc}", line=ln) from exc
        if len(cycle) != k:
            raise ParseError("OFF face count mismatch", line=ln)
        if any(i < 0 or i >= nv for i in cycle):
            raise ParseError("OFF face index out of range", line=ln)
        faces.append(cycle)
    return verts, faces


def _write_off(mesh: Mesh, fh) -> None:
    fh.write("OFF\n")
    fh.write(f"{len(mesh.positions)} {len(mesh.combinatorics.faces)} "
             f"{len(mesh.combinatorics.edges)}\n")
    for v in mesh.positions:
        fh.write(f"{_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}\n")
    for cyc in mesh.combinatorics.faces:
        fh.write(f"{len(cyc)} " + " ".join(str(i) for i in cyc) + "\n")


# --- public mesh I/O ------------------------------------------------------------

def _infer_format(path: str, fmt: str | None) -> str:
    if fmt is not None:
        return fmt.lower()
    ext = os.path.splitext(path)[1].lower().lstrip(".")
    if ext in ("obj", "off"):
        return ext
    raise ValueError(f"cannot infer mesh format from {path!r}")


def parse_mesh(path: str, fmt: str | None = None) -> Mesh:
    """Load an OBJ or OFF polygon mesh (normals/texcoords ignored)."""
    fmt = _infer_format(path, fmt)
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    if fmt == "obj":
        verts, faces = _parse_obj(lines)
    elif fmt == "off":
        verts, faces = _parse_off(lines)
    else:
        raise ValueError(f"unknown mesh format {fmt!r}")
    positions = np.asarray(verts, dtype=float).reshape(len(verts), 3)
    comb = build_combinatorics(faces, vertex_count=len(verts))
    return Mesh(comb, positions)


def write_mesh(mesh: Mesh, path: str, fmt: str | None = None) -> None:
    """Write OBJ/OFF with 17-significant-digit coordinates (exact round trip)."""
    fmt = _infer_format(path, fmt)
    with open(path, "w", encoding="utf-8") as fh:
        if fmt == "obj":
            _write_obj(mesh, fh)
        elif fmt == "off":
            _write_off(mesh, fh)
        else:
            raise ValueError(f"unknown mesh format {fmt!r}")


# --- pair files -------------------------------------------------------------------

def write_pair(m: Mesh, s: Mesh, path: str, metadata: dict | None = None) -> None:
    doc = {
        "faces": [list(c) for c in m.combinatorics.faces],
        "metadata": metadata or {},
        "vertices_m": [[float(x) for x in row] for row in m.positions],
        "vertices_s": [[float(x) for x in row] for row in s.positions],
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))
        fh.write("\n")


def parse_pair(path: str, tol: float = 0.0):
    """Load a pair file into a validated ParallelPair plus its metadata."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", line=exc.lineno) from exc
    for key in ("vertices_m", "vertices_s", "faces"):
        if key not in doc:
            raise ParseError(f"pair file misses {key!r}")
    vm = np.asarray(doc["vertices_m"], dtype=float)
    vs = np.asarray(doc["vertices_s"], dtype=float)
    if vm.shape != vs.shape or vm.ndim != 2 or vm.shape[1] != 3:
        raise ParseError("vertices_m and vertices_s must be equal-length 3-vector lists")
    comb = build_combinatorics(doc["faces"], vertex_count=len(vm))
    pair = ParallelPair(Mesh(comb, vm), Mesh(comb, vs), tol)
    return pair, doc.get("metadata", {})


# --- deterministic JSON ------------------------------------------------------------

def dumps(obj) -> str:
    """JSON with sorted keys and 17-significant-digit floats."""
    return "".join(_emit(obj))


def _emit(obj):
    if isinstance(obj, dict):
        yield "{"
        for k, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise TypeError("JSON object keys must be strings")
            if k:
                yield ", "
            yield json.dumps(key)
            yield ": "
            yield from _emit(obj[key])
        yield "}"
    elif isinstance(obj, (list, tuple)):
        yield "["
        for k, item in enumerate(obj):
            if k:
                yield ", "
            yield from _emit(item)
        yield "]"
    elif isinstance(obj, bool) or obj is None:
        yield json.dumps(obj)
    elif isinstance(obj, (int, np.integer)):
        yield str(int(obj))
    elif isinstance(obj, (float, np.floating)):
        yield _fmt(float(obj))
    elif isinstance(obj, str):
        yield json.dumps(obj)
    elif isinstance(obj, np.ndarray):
        yield from _emit(obj.tolist())
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


# --- curvature reports ----------------------------------------------------------------

def curvature_report(pair: ParallelPair, tol: float = 1e-9) -> dict:
    """Per-face and per-edge curvature records with summary statistics.

    Faces of vanishing area appear with null curvatures and defined=False;
    every input face appears exactly once.
    """
    planes = face_planarity(pair.m)
    reports = all_face_curvatures(pair)
    edges = edge_curvatures(pair)
    faces_out = []
    undefined = []
    hs, ks = [], []
    for f, rep in enumerate(reports):
        row = {"face": f, "planarity_residual": float(planes[f].residual)}
        if rep is None:
            row.update({"defined": False, "H": None, "K": None,
                        "kappa1": None, "kappa2": None,
                        "A_m": None, "A_s": None, "A_ms": None})
            undefined.append(f)
        else:
            k1, k2 = rep.principal if rep.principal else (None, None)
            row.update(
                {
                    "defined": True,
                    "H": rep.H,
                    "K": rep.K,
                    "kappa1": k1,
                    "kappa2": k2,
                    "A_m": rep.area_m,
                    "A_s": rep.area_s,
                    "A_ms": rep.area_ms,
                }
            )
            hs.append(rep.H)
            ks.append(rep.K)
        faces_out.append(row)
    edges_out = [
        {
            "edge": list(e.edge),
            "kappa": e.kappa,
            "center": None if e.center is None else [float(x) for x in e.center],
        }
        for e in edges
    ]

    def stats(vals):
        if not vals:
            return {"min": None, "max": None, "mean": None}
        arr = np.asarray(vals)
        return {"min": float(arr.min()), "max": float(arr.max()),
                "mean": float(arr.mean())}

    flags = {}
    if hs:
        h_arr, k_arr = np.asarray(hs), np.asarray(ks)
        h_spread = float(np.ptp(h_arr))
        k_spread = float(np.ptp(k_arr))
        flags = {
            "constant_H": bool(h_spread <= tol * max(1.0, float(np.abs(h_arr).max()))),
            "constant_K": bool(k_spread <= tol * max(1.0, float(np.abs(k_arr).max()))),
            "minimal": bool(float(np.abs(h_arr).max()) <= tol),
        }
    return {
        "faces": faces_out,
        "edges": edges_out,
        "summary": {
            "H": stats(hs),
            "K": stats(ks),
            "face_count": len(faces_out),
            "edge_count": len(edges_out),
            "undefined_faces": undefined,
            "flags": flags,
        },
    }


def write_report(report: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(report))
        fh.write("\n")


def human_tables(report: dict) -> str:
    """6-digit tables for terminal reading."""
    lines = []
    lines.append(f"{'face':>6} {'H':>14} {'K':>14} {'kappa1':>14} {'kappa2':>14}")
    for row in report["faces"]:
        if row["defined"]:
            def g(v):
                return "-" if v is None else format(v, ".6g")
            lines.append(
                f"{row['face']:>6} {g(row['H']):>14} {g(row['K']):>14} "
                f"{g(row['kappa1']):>14} {g(row['kappa2']):>14}"
            )
        else:
            lines.append(f"{row['face']:>6} {'undefined':>14}")
    s = report["summary"]
    for name in ("H", "K"):
        st = s[name]
        if st["min"] is not None:
            lines.append(
                f"{name}: min {st['min']:.6g}  max {st['max']:.6g}  mean {st['mean']:.6g}"
            )
    if s["flags"]:
        on = [k for k, v in s["flags"].items() if v]
        lines.append("flags: " + (", ".join(on) if on else "none"))
    return "\n".join(lines) + "\n"
