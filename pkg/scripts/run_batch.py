#!/usr/bin/env python3
"""
Find eigenvalues and transversality data for every profile in a directory.

Results go to VORTEX_SPECTRA_OUTPUT_DIR (default data/results), one CSV and
one JSON per profile.

Usage:
    python scripts/run_batch.py data/profiles --m 3:6
"""

import sys
import logging
import argparse
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.analysis import ABUNDANCE, SCARCITY, find_eigenvalues
from src.config import Settings
from src.errors import VortexSpectraError
from src.profile import load_profile
from src.storage import ResultWriter, config_hash
from src.cli import parse_modes

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def main():
    """Run find-eigenvalues over a directory of profile configs."""
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("profiles", type=Path, help="Directory of .toml/.json profile configs")
    parser.add_argument("--m", default="3:6", help="Symmetries: 3, 3,5,7 or 3:6")
    parser.add_argument("--alpha", type=float, default=1.5)
    args = parser.parse_args()

    logger.info("=" * 60)
    logger.info("Vortex Spectra Batch Run")
    logger.info("=" * 60)

    try:
        settings = Settings.from_env()
        ms = parse_modes(args.m)
        paths = sorted(p for p in args.profiles.iterdir() if p.suffix in (".toml", ".json"))
        if not paths:
            logger.error(f"No profile configs found in {args.profiles}")
            return 1

        failures = 0
        for path in paths:
            logger.info(f"\nProfile {path.name}...")
            try:
                p = load_profile(path)
                p.validate_hypotheses().raise_for_failure()
                regime = SCARCITY if p.sign == "positive" else ABUNDANCE
                frame = find_eigenvalues(p, ms, regime, alpha=args.alpha, tol=settings.tol, threads=settings.threads)
            except VortexSpectraError as e:
                logger.error(f"✗ {path.name}: {type(e).__name__}: {e.message}")
                failures += 1
                continue

            run_hash = config_hash({"profile": p.to_config(), "m": list(ms), "alpha": args.alpha, "tol": settings.tol})
            writer = ResultWriter("find-eigenvalues", run_hash)
            writer.write_csv(frame, settings.output_dir / f"{path.stem}_eigenvalues.csv")
            writer.write_json(frame.to_dict(orient="records"), settings.output_dir / f"{path.stem}_eigenvalues.json")

            ok = frame[frame["status"] == "ok"]
            for _, row in ok.iterrows():
                logger.info(f"  m={int(row['m'])}: Omega={row['omega']:.12f}  I_m={row['I_m']:.4e}  verdict={row['verdict']}")

        logger.info("\n" + "=" * 60)
        logger.info(f"✓ Batch complete: {len(paths) - failures}/{len(paths)} profiles")
        logger.info("=" * 60)
        return 0 if failures == 0 else 1

    except Exception as e:
        logger.error(f"\n✗ Error: {e}", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
