"""Command-line pipelines and the verification harness.

Subcommands: encode, taper, codesim, graphgen, graphtable, decode, firstq,
oa, hperp, verify.  Reports are JSON with sorted keys and no wall-clock
content unless requested, so identical configurations produce
byte-identical files.  The process exits nonzero when any enabled check
fails.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from fertaper.codeword import (
    CodeEncoding,
    apply_frames_to_isometry,
    build_simulator_hamiltonian,
    four_body_simulator,
    load_pcm,
    two_body_simulator,
)
from fertaper.fermion import (
    FermionHamiltonian,
    dense_fock_matrix,
    random_hamiltonian,
    sector_matrix_direct,
)
from fertaper.firstq import (
    RegisterEncoding,
    bin_terms,
    default_penalty_scale,
    first_quantized_parts,
    rao_hamming_oa,
    spectrum_matches_partitions,
)
from fertaper.graphs import (
    girth,
    graph_decode,
    greedy_high_girth,
    load_graph,
    save_graph,
)
from fertaper.mitm import brute_force_decode, build_tables, mitm_decode
from fertaper.pauli import (
    PauliOperator,
    QubitHamiltonian,
    hamiltonian_from_text,
    hamiltonian_to_text,
)
from fertaper.standard_maps import build_encoding, encode_hamiltonian
from fertaper.tapering import (
    all_sectors,
    build_plan,
    clifford_transform,
    find_symmetries,
    taper,
)

MAP_NAMES = {"jw": "jordan_wigner", "parity": "parity", "bintree": "binary_tree"}


@dataclass
class PipelineConfig:
    """Settings of one end-to-end run; defaults mirror the CLI flags."""

    input_path: str
    encoding: str = "jw"
    sector: tuple[int, ...] | None = None
    enumerate_sectors: bool = True
    penalty: float | None = None
    verification: str = "structural"  # none | structural | dense-oracle
    seed: int = 0
    graph_path: str | None = None
    check_path: str | None = None
    output_path: str | None = None
    report_path: str | None = None


@dataclass
class RunReport:
    """Outcome record: every check carries a pass flag and a residual."""

    config: dict = field(default_factory=dict)
    qubits_before: int | None = None
    qubits_after: int | None = None
    generators: list = field(default_factory=list)
    paired_qubits: list = field(default_factory=list)
    sector_energies: dict = field(default_factory=dict)
    best_sector: str | None = None
    sparsity: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    timings: dict | None = None

    def add_check(self, name: str, passed: bool, residual: float | None = None):
        entry = {"name": name, "passed": bool(passed)}
        if residual is not None:
            entry["residual"] = float(residual)
        self.checks.append(entry)

    @property
    def all_passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_json(self) -> str:
        payload = {
            "config": self.config,
            "qubits_before": self.qubits_before,
            "qubits_after": self.qubits_after,
            "generators": self.generators,
            "paired_qubits": self.paired_qubits,
            "sector_energies": self.sector_energies,
            "best_sector": self.best_sector,
            "sparsity": self.sparsity,
            "checks": self.checks,
            "timings": self.timings,
        }
        return json.dumps(payload, indent=1, sort_keys=True)


def _sector_label(sector) -> str:
    return "".join("+" if s == 1 else "-" for s in sector)


def _parse_sector(text: str) -> tuple[int, ...]:
    if any(c not in "+-" for c in text):
        raise ValueError(f"sector string must be over +/-, got {text!r}")
    return tuple(1 if c == "+" else -1 for c in text)


def run_pipeline(cfg: PipelineConfig) -> RunReport:
    """Encode, detect symmetries, taper, and report sector energies.

    With encoding "graph" the run instead builds a codeword simulator from
    the graph or parity-check file and reports sparsity and decoder
    cross-checks.
    """
    report = RunReport(config={k: str(v) for k, v in vars(cfg).items()})
    if cfg.encoding == "graph":
        return _run_graph_pipeline(cfg, report)
    with open(cfg.input_path, encoding="utf-8") as fh:
        h_fermi = FermionHamiltonian.from_json(fh.read())
    enc = build_encoding(MAP_NAMES.get(cfg.encoding, cfg.encoding), h_fermi.modes)
    h_qubit = encode_hamiltonian(h_fermi, enc)
    report.qubits_before = h_qubit.qubit_count

    group = find_symmetries(h_qubit)
    plan = build_plan(group, h_qubit)
    report.generators = [g.label for g in group.generators]
    report.paired_qubits = list(plan.paired_qubits)
    if group.size == h_qubit.qubit_count and len(h_qubit.canonicalize().terms) <= 1:
        report.add_check("degenerate_hamiltonian_flagged", True)
    transformed = clifford_transform(h_qubit, plan)
    report.qubits_after = h_qubit.qubit_count - plan.size

    reduced_cap = h_qubit.qubit_count - plan.size
    if cfg.sector is not None:
        sectors = [tuple(cfg.sector)]
    elif cfg.enumerate_sectors and reduced_cap <= 12:
        sectors = all_sectors(plan.size)
    else:
        raise ValueError(
            f"{reduced_cap} qubits remain after tapering; sector enumeration "
            "is capped at 12, pass an explicit sector"
        )
    best = None
    for sector in sectors:
        reduced = taper(transformed, plan, sector)
        if reduced.qubit_count and reduced_cap <= 12:
            energy = float(np.linalg.eigvalsh(reduced.dense())[0])
        elif reduced.qubit_count == 0:
            energy = float(sum(c.real for c, _ in reduced.terms))
        else:
            continue
        report.sector_energies[_sector_label(sector)] = energy
        if best is None or energy < best[1]:
            best = (sector, energy)
    if best is not None:
        report.best_sector = _sector_label(best[0])

    if cfg.verification == "dense-oracle" and h_qubit.qubit_count <= 10:
        full = np.sort(np.linalg.eigvalsh(h_qubit.dense()))
        trans = np.sort(np.linalg.eigvalsh(transformed.dense()))
        report.add_check("transform_isospectral", np.allclose(full, trans, atol=1e-9),
                         float(np.abs(full - trans).max()))
        if cfg.enumerate_sectors and cfg.sector is None:
            union = np.sort(np.concatenate(
                [np.linalg.eigvalsh(taper(transformed, plan, s).dense())
                 if (h_qubit.qubit_count - plan.size) else
                 [sum(c.real for c, _ in taper(transformed, plan, s).terms)]
                 for s in sectors]))
            report.add_check("sector_union_isospectral",
                             np.allclose(union, full, atol=1e-9),
                             float(np.abs(union - full).max()))
        # tapered sectors cover the whole Fock space, so their minimum is
        # the global ground energy, not the N-sector one
        want = float(np.linalg.eigvalsh(dense_fock_matrix(h_fermi))[0])
        got = min(report.sector_energies.values())
        report.add_check("global_ground_energy", abs(got - want) < 1e-9, abs(got - want))
    elif cfg.verification != "none":
        report.add_check("terms_i_or_x_on_paired_qubits", all(
            op.letter_at(q) in "IX"
            for _, op in transformed.terms for q in plan.paired_qubits
        ))

    if cfg.output_path:
        sector = best[0] if best is not None else (cfg.sector or (1,) * plan.size)
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(hamiltonian_to_text(taper(transformed, plan, sector)))
    return report


def _run_graph_pipeline(cfg: PipelineConfig, report: RunReport) -> RunReport:
    with open(cfg.input_path, encoding="utf-8") as fh:
        h_fermi = FermionHamiltonian.from_json(fh.read())
    if cfg.graph_path:
        graph = load_graph(cfg.graph_path)
        enc = CodeEncoding.from_graph(graph, h_fermi.particles)
    elif cfg.check_path:
        enc = CodeEncoding(load_pcm(cfg.check_path), h_fermi.particles)
        graph = None
    else:
        raise ValueError("graph pipeline needs --graph or --check")
    report.qubits_before = h_fermi.modes
    report.qubits_after = enc.qubits

    rng = np.random.default_rng(cfg.seed)
    modes = enc.modes
    r2 = 0
    for _ in range(4):
        a, b = rng.choice(modes, size=2, replace=False) + 1
        r2 = max(r2, two_body_simulator(enc, int(a), int(b)).sparsity)
    r4 = 0
    for _ in range(4):
        picks = rng.choice(modes, size=4, replace=False) + 1
        r4 = max(r4, four_body_simulator(enc, *(int(v) for v in picks)).sparsity)
    report.sparsity = {"r2_max_seen": r2, "r4_max_seen": r4}
    weight = enc.max_column_weight
    drop = 3 if enc.bipartition else 1
    report.add_check("two_body_sparsity", r2 <= 1 << max(2 * weight - drop, 0), r2)
    report.add_check("four_body_sparsity", r4 <= 1 << max(4 * weight - drop, 0), r4)

    if graph is not None:
        ok = True
        for _ in range(64):
            syndrome = rng.integers(0, 2, size=enc.qubits).astype(np.uint8)
            via_graph = graph_decode(graph, syndrome, enc.particles)
            via_brute = brute_force_decode(enc.matrix, enc.particles, syndrome)
            if (via_graph is None) != (via_brute is None):
                ok = False
            elif via_graph is not None and not np.array_equal(via_graph, via_brute):
                ok = False
        report.add_check("decode_cross_check", ok)
    if cfg.verification == "dense-oracle" and enc.qubits <= 14:
        frames = build_simulator_hamiltonian(h_fermi, enc, cfg.penalty)
        iso = enc.isometry()
        app = apply_frames_to_isometry(frames, enc)
        leak = float(np.abs(app - iso @ (iso.T @ app)).max())
        block = iso.T @ app
        sec = sector_matrix_direct(h_fermi)
        report.add_check("codespace_preserved", leak < 1e-9, leak)
        report.add_check("codespace_block_matches_sector",
                         np.allclose(block, sec, atol=1e-9),
                         float(np.abs(block - sec).max()))
    return report


# -- subcommand handlers ------------------------------------------------------


def _cmd_encode(args) -> int:
    with open(args.input, encoding="utf-8") as fh:
        h = FermionHamiltonian.from_json(fh.read())
    enc = build_encoding(MAP_NAMES[args.map], h.modes)
    out = encode_hamiltonian(h, enc)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(hamiltonian_to_text(out))
    print(f"encoded {h.modes} modes -> {out.qubit_count} qubits, {len(out)} terms")
    return 0


def _cmd_taper(args) -> int:
    with open(args.input, encoding="utf-8") as fh:
        h = hamiltonian_from_text(fh.read())
    group = find_symmetries(h)
    plan = build_plan(group, h)
    transformed = clifford_transform(h, plan)
    report = RunReport(config={"input": args.input, "sector": args.sector or "enumerate"})
    report.qubits_before = h.qubit_count
    report.qubits_after = h.qubit_count - plan.size
    report.generators = [g.label for g in group.generators]
    report.paired_qubits = list(plan.paired_qubits)

    if args.sector:
        sectors = [_parse_sector(args.sector)]
    elif h.qubit_count - plan.size <= 12:
        sectors = all_sectors(plan.size)
    else:
        raise ValueError(
            f"{h.qubit_count - plan.size} qubits remain; enumeration is "
            "capped at 12, pass --sector"
        )
    best = None
    for sector in sectors:
        reduced = taper(transformed, plan, sector)
        if reduced.qubit_count > 12:
            continue  # too large to diagonalize; still written below
        energy = (float(np.linalg.eigvalsh(reduced.dense())[0])
                  if reduced.qubit_count else
                  float(sum(c.real for c, _ in reduced.terms)))
        report.sector_energies[_sector_label(sector)] = energy
        if best is None or energy < best[1]:
            best = (sector, energy)
    chosen = best[0] if best is not None else sectors[0]
    if best is not None:
        report.best_sector = _sector_label(chosen)
    reduced = taper(transformed, plan, chosen)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(hamiltonian_to_text(reduced))
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    print(f"tapered {h.qubit_count} -> {reduced.qubit_count} qubits "
          f"({plan.size} symmetries), sector {report.best_sector}")
    return 0


def _cmd_codesim(args) -> int:
    with open(args.input, encoding="utf-8") as fh:
        h = FermionHamiltonian.from_json(fh.read())
    if args.graph:
        enc = CodeEncoding.from_graph(load_graph(args.graph), h.particles)
    else:
        enc = CodeEncoding(load_pcm(args.check), h.particles)
    frames = build_simulator_hamiltonian(h, enc, args.penalty)
    payload = []
    for frame in frames:
        entry = {
            "frame": frame.frame_pauli().label,
            "weight": frame.weight,
            "flip_qubits": list(frame.flips),
        }
        if enc.qubits <= 24:
            entry["diagonal"] = [float(v) for v in frame.materialize()]
        else:
            entry["diagonal"] = "lazy"
        payload.append(entry)
    with open(args.output, "w", encoding="utf-8") as fh:
        json.dump({"qubits": enc.qubits, "terms": payload}, fh, indent=1)
    print(f"wrote {len(frames)} framed terms on {enc.qubits} qubits")
    return 0


def _cmd_graphgen(args) -> int:
    g = greedy_high_girth(args.qubits, args.particles, args.trials, args.seed)
    save_graph(g, args.out)
    print(f"graph: {g.vertex_count} vertices, {g.edge_count} edges, girth {girth(g)}")
    return 0


def _cmd_graphtable(args) -> int:
    lines = ["Q," + ",".join(f"N={n}" for n in range(1, args.nmax + 1))]
    for q in range(4, args.qmax + 1):
        row = [str(q)]
        for n in range(1, args.nmax + 1):
            g = greedy_high_girth(q, n, args.trials, args.seed)
            row.append(str(g.edge_count))
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def _cmd_decode(args) -> int:
    a = load_pcm(args.check)
    syndrome = np.array([int(c) for c in args.syndrome], dtype=np.uint8)
    tables = build_tables(a, args.particles)
    hit = mitm_decode(tables, syndrome)
    if hit is None:
        print("no weight-matching preimage")
        return 1
    print("".join(str(int(b)) for b in hit))
    return 0


def _cmd_firstq(args) -> int:
    with open(args.input, encoding="utf-8") as fh:
        h = FermionHamiltonian.from_json(fh.read())
    enc = RegisterEncoding(h.modes, h.particles)
    parts = first_quantized_parts(h, enc)
    scale = args.penalty if args.penalty is not None else default_penalty_scale(h)
    total = parts.total(scale)
    oa = rao_hamming_oa(enc.register_bits)
    groups = bin_terms(total, oa, enc)
    payload = {
        "qubits": enc.qubits,
        "registers": enc.particles,
        "register_bits": enc.register_bits,
        "penalty_scale": scale,
        "groups": [
            {
                "basis": list(row),
                "terms": [
                    {"re": c.real, "im": c.imag, "pauli": op.label} for c, op in terms
                ],
            }
            for row, terms in groups
        ],
    }
    with open(args.emit_bins, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
    print(f"{len(groups)} measurement groups for {len(total)} terms "
          f"on {enc.qubits} qubits (cap {9 ** enc.register_bits})")
    return 0


def _cmd_oa(args) -> int:
    oa = rao_hamming_oa(args.m)
    print(f"array: {oa.row_count} rows x {oa.column_count} columns")
    if args.verify:
        ok = oa.verify_strength_two()
        print("strength-2 index-1:", "pass" if ok else "FAIL")
        return 0 if ok else 1
    return 0


def _cmd_hperp(args) -> int:
    ok, got, want = spectrum_matches_partitions(args.N, args.M)
    if args.spectrum:
        print("eigenvalues:", ", ".join(str(v) for v in got))
        print("from partitions:", ", ".join(str(v) for v in want))
    print("spectrum matches partitions:", "pass" if ok else "FAIL")
    return 0 if ok else 1


# -- verify suites ------------------------------------------------------------

H2_TABLE = (
    "ZIII", "IZII", "IIZI", "IIIZ",
    "ZZII", "ZIZI", "ZIIZ", "IZZI", "IZIZ", "IIZZ",
    "YYXX", "XYYX", "YXXY", "XXYY",
)

H2_TRANSFORMED = (
    "ZIII", "ZXII", "ZIXI", "ZIIX",
    "IXII", "IIXI", "IIIX", "IXXI", "IXIX", "IIXX",
    "XIXX", "XIIX", "XXXI", "XXII",
)


def h2_operator_table() -> QubitHamiltonian:
    coeffs = [0.1 * (i + 1) for i in range(len(H2_TABLE))]
    return QubitHamiltonian(
        4, tuple((c, PauliOperator.from_label(l)) for c, l in zip(coeffs, H2_TABLE))
    )


def verify_suite(suite: str, modes: int = 5, particles: int = 2, seed: int = 7,
                 m_param: int = 2) -> RunReport:
    """Self-contained oracle suites exposed on the command line."""
    report = RunReport(config={"suite": suite, "M": str(modes), "N": str(particles),
                               "seed": str(seed), "m": str(m_param)})
    if suite == "h2":
        h = h2_operator_table()
        group = find_symmetries(h)
        want = [PauliOperator.from_label(l) for l in ("ZZII", "ZIZI", "ZIIZ")]
        report.add_check("symmetry_group", group.same_group(want))
        plan = build_plan(group, h)
        report.add_check("paired_qubits", plan.paired_qubits == (2, 3, 4))
        transformed = clifford_transform(h, plan)
        report.add_check(
            "transformed_table", transformed.operator_set() == set(H2_TRANSFORMED)
        )
        reduced = taper(transformed, plan, (1, 1, 1))
        report.add_check("single_qubit_left", reduced.qubit_count == 1)
        full = np.sort(np.linalg.eigvalsh(h.dense()))
        trans = np.sort(np.linalg.eigvalsh(transformed.dense()))
        report.add_check("isospectral", bool(np.allclose(full, trans, atol=1e-12)),
                         float(np.abs(full - trans).max()))
    elif suite == "spectra":
        rng = np.random.default_rng(seed)
        h = random_hamiltonian(modes, particles, rng)
        ref = np.sort(np.linalg.eigvalsh(dense_fock_matrix(h)))
        for kind in ("jordan_wigner", "parity", "binary_tree"):
            enc = build_encoding(kind, modes)
            q = encode_hamiltonian(h, enc)
            full = np.sort(np.linalg.eigvalsh(q.dense()))
            report.add_check(f"{kind}_spectrum", bool(np.allclose(full, ref, atol=1e-9)),
                             float(np.abs(full - ref).max()))
            plan_, transformed_, _ = _taper_triplet(q)
            union = []
            for sector in all_sectors(plan_.size):
                red = taper(transformed_, plan_, sector)
                union.extend(
                    np.linalg.eigvalsh(red.dense()) if red.qubit_count
                    else [sum(c.real for c, _ in red.terms)]
                )
            union = np.sort(np.asarray(union, dtype=float))
            report.add_check(f"{kind}_sector_union", bool(np.allclose(union, ref, atol=1e-9)),
                             float(np.abs(union - ref).max()))
    elif suite == "oa":
        oa = rao_hamming_oa(m_param)
        report.add_check("dimensions", oa.row_count == 9 ** m_param
                         and oa.column_count == 3 ** m_param + 1)
        report.add_check("strength_two", oa.verify_strength_two())
    else:
        raise ValueError(f"unknown suite {suite!r}; choose h2, spectra, or oa")
    return report


def _taper_triplet(h: QubitHamiltonian):
    group = find_symmetries(h)
    plan = build_plan(group, h)
    return plan, clifford_transform(h, plan), group


def _cmd_verify(args) -> int:
    started = time.time()
    report = verify_suite(args.suite, args.M, args.N, args.seed, args.m)
    if args.timings:
        report.timings = {"wall_seconds": time.time() - started}
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    for check in report.checks:
        mark = "pass" if check["passed"] else "FAIL"
        residual = f" (residual {check['residual']:.3g})" if "residual" in check else ""
        print(f"{check['name']}: {mark}{residual}")
    return 0 if report.all_passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fertaper",
        description="Fermion-to-qubit encodings, symmetry tapering, and sparse simulators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="map a fermionic Hamiltonian to qubits")
    p.add_argument("--input", required=True, help="Hamiltonian JSON file")
    p.add_argument("--map", required=True, choices=sorted(MAP_NAMES))
    p.add_argument("--output", required=True, help="Pauli text file to write")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("taper", help="detect symmetries and remove qubits")
    p.add_argument("--input", required=True, help="Pauli text file")
    p.add_argument("--sector", help="sector signs, e.g. ++-")
    p.add_argument("--enumerate", action="store_true",
                   help="enumerate all sectors (default)")
    p.add_argument("--output", required=True)
    p.add_argument("--report", help="JSON report path")
    p.set_defaults(func=_cmd_taper)

    p = sub.add_parser("codesim", help="framed simulator from a parity-check code")
    p.add_argument("--check", help="parity-check matrix file")
    p.add_argument("--graph", help="bipartite graph file (alternative to --check)")
    p.add_argument("--input", required=True, help="Hamiltonian JSON file")
    p.add_argument("--penalty", type=float, default=None)
    p.add_argument("--output", required=True, help="framed-terms JSON")
    p.set_defaults(func=_cmd_codesim)

    p = sub.add_parser("graphgen", help="greedy high-girth bipartite graph")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--particles", type=int, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_graphgen)

    p = sub.add_parser("graphtable", help="CSV of best edge counts per (Q, N)")
    p.add_argument("--qmax", type=int, required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_graphtable)

    p = sub.add_parser("decode", help="meet-in-the-middle syndrome decode")
    p.add_argument("--check", required=True)
    p.add_argument("--particles", type=int, required=True)
    p.add_argument("--syndrome", required=True, help="bit string, qubit 1 first")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("firstq", help="register encoding with measurement groups")
    p.add_argument("--input", required=True)
    p.add_argument("--penalty", type=float, default=None)
    p.add_argument("--emit-bins", required=True, help="JSON output path")
    p.set_defaults(func=_cmd_firstq)

    p = sub.add_parser("oa", help="orthogonal array construction / verification")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=_cmd_oa)

    p = sub.add_parser("hperp", help="exchange-penalty spectrum versus partitions")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--spectrum", action="store_true")
    p.set_defaults(func=_cmd_hperp)

    p = sub.add_parser("verify", help="run an oracle suite")
    p.add_argument("--suite", required=True, choices=("h2", "spectra", "oa"))
    p.add_argument("--M", type=int, default=5)
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--report")
    p.add_argument("--timings", action="store_true",
                   help="include wall-clock timings (breaks byte-reproducibility)")
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, MemoryError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
