"""Command-line runner: ``honest``, ``attack``, ``verify`` and ``demo``.

Exit codes: 0 when every assertion for the mode holds, 1 when one fails,
2 when the configuration is invalid.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path

from .attacks import check_target, plan_for, run_attack
from .errors import ConfigError, GKALabError
from .gfpoly import encode_width
from .protocol import GroupRoster, Variant
from .report import RunReport, build_report
from .scheme import SchemeParams
from .session import Session

REPORT_NAME = "report.json"
TRANSCRIPT_NAME = "transcript.jsonl"


@dataclass
class ScenarioConfig:
    p: int = 1009
    n: int = 12
    t: int = 2
    h: int = 4
    variant: str = "chh"
    seed: int = 0
    mode: str = "honest"
    roster: list[int] | None = None
    m: int | None = None
    adversary: int | None = None
    victim: int | None = None
    target_key: object = "random"
    stage4_masquerade: bool = True
    literal_variant_a_formula: bool = False

    @classmethod
    def from_dict(cls, d: dict) -> ScenarioConfig:
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        unknown = set(d) - set(known) - {"out"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**known)

    def to_dict(self) -> dict:
        return asdict(self)

    def validate(self) -> tuple[SchemeParams, GroupRoster, Variant]:
        """Check every invariant up front; returns the parsed pieces."""
        try:
            variant = Variant(self.variant)
        except ValueError:
            raise ConfigError(f"unknown variant {self.variant!r}") from None
        if self.mode not in ("honest", "attack"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        params = SchemeParams(self.p, self.n, self.t, self.h)
        roster = GroupRoster.of(self.resolve_roster())
        try:
            roster.check_against(self.n)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.mode == "attack":
            if self.literal_variant_a_formula and variant is not Variant.HHXZZ_SUM:
                raise ConfigError("--literal-variant-a-formula needs --variant hhxzz-a")
            for role in ("adversary", "victim"):
                who = getattr(self, role)
                if who is not None and who not in roster:
                    raise ConfigError(f"{role} U_{who} must be a roster member")
            if self.adversary is not None and self.adversary == self.victim:
                raise ConfigError("victim and adversary must differ")
            if self.target_key != "random":
                check_target(variant, self.parsed_target(variant), self.p)
        return params, roster, variant

    def resolve_roster(self) -> list[int]:
        if self.roster:
            ids = [int(i) for i in self.roster]
            if len(set(ids)) != len(ids):
                raise ConfigError("roster ids must be distinct")
            if len(ids) < 2:
                raise ConfigError("roster needs at least two members")
            return ids
        if self.m is None:
            return list(range(1, self.n + 1))
        if not 2 <= self.m <= self.n:
            raise ConfigError(f"2 <= m <= n violated (m = {self.m})")
        return list(range(1, self.m + 1))

    def parsed_target(self, variant: Variant):
        K = self.target_key
        if K in (None, "random"):
            return "random"
        if variant is Variant.CHH_XOR:
            if isinstance(K, int):
                return K.to_bytes(encode_width(self.p), "big")
            try:
                return bytes.fromhex(str(K))
            except ValueError:
                raise ConfigError(f"CHH target key must be hex, got {K!r}") from None
        try:
            return int(K)
        except (TypeError, ValueError):
            raise ConfigError(f"target key must be an integer, got {K!r}") from None


def simulate(config: ScenarioConfig) -> tuple[RunReport, str]:
    """Run one scenario in memory; returns the report and the transcript text."""
    params, roster, variant = config.validate()
    session = Session(params, roster, variant, config.seed)
    if config.mode == "honest":
        session.run_honest()
        report = build_report(session, "honest")
    else:
        plan = plan_for(
            session,
            adversary=config.adversary,
            victim=config.victim,
            target=config.parsed_target(variant),
            stage4_masquerade=config.stage4_masquerade,
            literal_sum_formula=config.literal_variant_a_formula,
        )
        report = run_attack(session, plan)
    transcript = session.network.transcript.to_jsonl()
    report.config = config.to_dict()
    report.transcript_ref = {
        "path": TRANSCRIPT_NAME,
        "sha256": hashlib.sha256(transcript.encode()).hexdigest(),
    }
    return report, transcript


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_scenario(config: ScenarioConfig, out: str | Path | None = None):
    """Returns ``(exit_code, report, transcript)``; report is None on config errors."""
    try:
        report, transcript = simulate(config)
    except (GKALabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2, None, None
    if out is not None:
        out = Path(out)
        write_atomic(out / TRANSCRIPT_NAME, transcript)
        write_atomic(out / REPORT_NAME, report.to_json())
    return (0 if report.passed else 1), report, transcript


def run_demo(seed: int = 7, out: str | Path | None = None, stream=None):
    stream = stream or sys.stdout
    reports, lines = [], []
    for variant in Variant:
        config = ScenarioConfig(variant=variant.value, seed=seed, mode="attack", m=5)
        report, transcript = simulate(config)
        reports.append(report.to_dict())
        for line in transcript.splitlines():
            lines.append(json.dumps({"run": variant.value, **json.loads(line)}))
    rows = [("variant", "roster", "adv", "victim", "K", "K*", "victim key", "verdicts", "outcome")]
    for r in reports:
        verdicts = {m["verdict"] for m in r["members"].values()}
        rows.append((
            r["variant"], ",".join(map(str, r["roster"])), str(r["adversary"]), str(r["victim"]),
            str(r["K"]), str(r["K_star"]), str(r["members"][str(r["victim"])]["key"]),
            "/".join(sorted(verdicts)), r["outcome"],
        ))
    widths = [max(len(row[c]) for row in rows) for c in range(len(rows[0]))]
    for row in rows:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip(), file=stream)
    text = json.dumps({"seed": seed, "runs": reports}, indent=2) + "\n"
    transcript = "\n".join(lines) + "\n"
    if out is not None:
        out = Path(out)
        write_atomic(out / TRANSCRIPT_NAME, transcript)
        write_atomic(out / REPORT_NAME, text)
    ok = all(all(a["pass"] for a in r["assertions"]) for r in reports)
    return (0 if ok else 1), text, transcript


def verify_report(path: str | Path, stream=None) -> int:
    stream = stream or sys.stdout
    path = Path(path)
    try:
        original = path.read_text(encoding="utf-8")
        data = json.loads(original)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if "runs" in data:
        _, text, _ = run_demo(data["seed"], stream=io.StringIO())
    else:
        try:
            report, _ = simulate(ScenarioConfig.from_dict(data["config"]))
        except (GKALabError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        text = report.to_json()
    if text == original:
        print(f"{path}: reproduced byte-for-byte", file=stream)
        return 0
    a, b = original.splitlines(), text.splitlines()
    first = next((i for i, (x, y) in enumerate(zip(a, b)) if x != y), min(len(a), len(b)))
    print(f"{path}: differs from re-run starting at line {first + 1}", file=stream)
    return 1


def _scenario_args(p: argparse.ArgumentParser, attack: bool) -> None:
    p.add_argument("--config", help="JSON file mirroring the scenario fields")
    p.add_argument("--variant", choices=[v.value for v in Variant])
    p.add_argument("--p", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--h", type=int)
    p.add_argument("--roster", help="comma-separated participant ids, e.g. 1,3,5")
    p.add_argument("--m", type=int, help="use U_1..U_m when --roster is not given")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="directory for report.json and transcript.jsonl")
    if attack:
        p.add_argument("--victim", type=int)
        p.add_argument("--adversary", type=int)
        p.add_argument("--target-key", help="'random', an integer, or hex bytes for chh")
        p.add_argument("--no-masquerade", action="store_true",
                       help="forge the contribution but leave stage 4 traffic alone")
        p.add_argument("--literal-variant-a-formula", action="store_true",
                       help="use q_k + K + K* for the sum combiner forgery")


def config_from_args(args) -> ScenarioConfig:
    base: dict = {}
    if args.config:
        base = json.loads(Path(args.config).read_text(encoding="utf-8"))
    base["mode"] = args.command
    for name in ("variant", "p", "n", "t", "h", "m", "seed"):
        value = getattr(args, name)
        if value is not None:
            base[name] = value
    if args.roster:
        base["roster"] = [int(x) for x in args.roster.split(",") if x.strip()]
    if args.command == "attack":
        for name in ("victim", "adversary"):
            if getattr(args, name) is not None:
                base[name] = getattr(args, name)
        if args.target_key is not None:
            base["target_key"] = args.target_key
        if args.no_masquerade:
            base["stage4_masquerade"] = False
        if args.literal_variant_a_formula:
            base["literal_variant_a_formula"] = True
    return ScenarioConfig.from_dict(base)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gkalab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    _scenario_args(sub.add_parser("honest", help="run an honest session"), attack=False)
    _scenario_args(sub.add_parser("attack", help="run the insider attack"), attack=True)
    v = sub.add_parser("verify", help="re-run a report's config and diff the result")
    v.add_argument("report")
    d = sub.add_parser("demo", help="attack all three variants and print a summary")
    d.add_argument("--seed", type=int, default=7)
    d.add_argument("--out")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return verify_report(args.report)
    if args.command == "demo":
        return run_demo(args.seed, args.out)[0]
    try:
        config = config_from_args(args)
    except (GKALabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    code, report, _ = run_scenario(config, args.out)
    if report is not None:
        print(f"{report.mode} {Variant(report.variant).value}: {report.outcome}")
        for a in report.assertions:
            print(f"  {'PASS' if a['pass'] else 'FAIL'}  {a['name']}")
    return code


if __name__ == "__main__":
    sys.exit(main())
