#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Orlicz Solver Invariant Suites Startup Script
"""

import argparse
import io
import os
import subprocess
import sys
from pathlib import Path

# Windows consoles need UTF-8 for the emoji status lines
if sys.platform == "win32":
    try:
        sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding="utf-8", errors="replace")
        sys.stderr = io.TextIOWrapper(sys.stderr.buffer, encoding="utf-8", errors="replace")
    except (AttributeError, io.UnsupportedOperation):
        pass


def main():
    """Run `orlicz_cli.py verify` and save the JSON summary"""

    parser = argparse.ArgumentParser(description="Run the Orlicz solver invariant suites")
    parser.add_argument(
        "--suite",
        choices=["nfunction", "field", "functionals", "solvers", "all"],
        default="all",
        help="Suite to run (default: all)",
    )
    parser.add_argument("--seed", type=int, default=1, help="PRNG seed (default: 1)")
    parser.add_argument("--out", help="Write the JSON summary to this file as well")
    parser.add_argument("--debug", action="store_true", help="Enable debug logging")

    args = parser.parse_args()

    project_root = Path(__file__).parent
    cli_script = project_root / "src" / "orlicz_cli.py"

    if not cli_script.exists():
        print(f"❌ CLI script not found: {cli_script}")
        sys.exit(1)

    cmd = [sys.executable, str(cli_script), "verify", "--suite", args.suite, "--seed", str(args.seed)]
    env = None
    if args.debug:
        env = {**os.environ, "ORLICZ_DEBUG": "1"}

    print("🔍 Running Orlicz solver invariant suites...")
    print(f"📋 Suite: {args.suite}")
    print(f"🎲 Seed: {args.seed}")
    print()

    try:
        completed = subprocess.run(cmd, check=True, cwd=project_root, env=env, capture_output=True, text=True)

    except KeyboardInterrupt:
        print("\n👋 Verification stopped")
        sys.exit(1)

    except subprocess.CalledProcessError as e:
        print(e.stdout)
        print(e.stderr, file=sys.stderr)
        print(f"❌ Invariant suites failed (exit code {e.returncode})")
        sys.exit(1)

    except FileNotFoundError:
        print("❌ Python interpreter not found")
        sys.exit(1)

    print(completed.stdout)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(completed.stdout, encoding="utf-8")
        print(f"💾 Summary saved to: {out}")
    print("✅ All invariants passed")


if __name__ == "__main__":
    main()
