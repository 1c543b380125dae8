"""
Write the synthetic datasets to disk as manifest + CSV files.

Usage:
    uv run python scripts/export_synthetic.py                          # both generators, seed 0
    uv run python scripts/export_synthetic.py --only complementary_views --seed 3
    uv run python scripts/export_synthetic.py --output-dir data/synthetic --n 800
"""
import argparse
import logging
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config.settings import settings
from src.errors import RFDError
from src.ingestion.manifest import export_dataset
from src.ingestion.synthetic import GENERATORS, generate

logger = logging.getLogger(__name__)


def main() -> int:
    parser = argparse.ArgumentParser(
        description="Export synthetic multi-view datasets",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--output-dir", default="data/synthetic", help="Parent directory of the datasets")
    parser.add_argument("--only", type=str, help=f"Comma-separated generators ({', '.join(GENERATORS)})")
    parser.add_argument("--seed", type=int, default=0, help="Generator seed")
    parser.add_argument("--n", type=int, default=None, help="Instance count (generator default otherwise)")
    parser.add_argument("--verbose", action="store_true", help="Enable verbose logging")
    args = parser.parse_args()

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.LOG_LEVEL,
        format=settings.LOG_FORMAT,
    )

    names = args.only.split(",") if args.only else list(GENERATORS)
    invalid = set(names) - set(GENERATORS)
    if invalid:
        print(f"❌ Unknown generators: {', '.join(sorted(invalid))}")
        print(f"   Available: {', '.join(GENERATORS)}")
        return 1

    params = {} if args.n is None else {"n": args.n}
    print("=" * 60)
    print("🧪 EXPORTING SYNTHETIC DATASETS")
    print("=" * 60)
    for name in names:
        try:
            dataset = generate(name, seed=args.seed, **params)
        except RFDError as e:
            print(f"❌ {name}: {e}")
            return 3
        manifest = export_dataset(dataset, Path(args.output_dir) / name)
        print(f"✅ {name}: n={dataset.n}, Q={dataset.n_views}, C={dataset.n_classes} -> {manifest}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
