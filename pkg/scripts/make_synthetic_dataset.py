#!/usr/bin/env python3
"""
Management script for synthetic DefChars datasets.
"""

import argparse
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from defchar_retrieval.dataset import class_count_list, class_distribution, load_manifest, load_patterns  # noqa: E402
from defchar_retrieval.dataset import write_synthetic_dataset  # noqa: E402
from defchar_retrieval.evaluation import distribution_table  # noqa: E402
from defchar_retrieval.exceptions import DefCharError  # noqa: E402

# Per-class pattern counts matching the public benchmark datasets
PRESETS = {
    'small': (12, 10, 8),
    'wind-turbine': (89, 73, 118, 24),
    'lake-ice': (606, 1207, 3237, 315),
    'chest-ct': (2317, 1668, 680),
    'heatsink': (2160, 4927),
}


def generate(out_dir, counts, image_side, seed, name):
    """Write a synthetic dataset and print its class distribution."""
    if image_side < 16:
        print("❌ Image side must be at least 16 pixels")
        return False
    manifest_path = write_synthetic_dataset(out_dir, counts, image_side=image_side, seed=seed, name=name)
    print(f"✅ Wrote {sum(counts)} patterns to {out_dir}")
    print(f"   Manifest: {manifest_path}")
    return True


def describe(manifest_path):
    """Print the class distribution of an existing manifest."""
    manifest = load_manifest(manifest_path)
    records = load_patterns(manifest)
    print(distribution_table(class_distribution(records), f'Class distribution: {manifest.name}'))
    return True


def main():
    parser = argparse.ArgumentParser(description='Create and inspect synthetic DefChars datasets')
    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    generate_parser = subparsers.add_parser('generate', help='Write a synthetic dataset')
    generate_parser.add_argument('out_dir', help='Output directory')
    group = generate_parser.add_mutually_exclusive_group()
    group.add_argument('--preset', choices=sorted(PRESETS), default='small',
                       help='Per-class counts preset (default: small)')
    group.add_argument('--counts', help='Per-class counts, e.g. 40,30,20')
    generate_parser.add_argument('--size', type=int, default=64, help='Image side in pixels (default: 64)')
    generate_parser.add_argument('--seed', type=int, default=0, help='Random seed (default: 0)')
    generate_parser.add_argument('--name', default='synthetic', help='Dataset name stored in the manifest')

    describe_parser = subparsers.add_parser('describe', help='Show the class distribution of a manifest')
    describe_parser.add_argument('manifest', help='Manifest JSON')

    args = parser.parse_args()

    if not args.command:
        parser.print_help()
        return 0

    try:
        if args.command == 'generate':
            counts = class_count_list(args.counts) if args.counts else PRESETS[args.preset]
            ok = generate(args.out_dir, counts, args.size, args.seed, args.name)
        else:
            ok = describe(args.manifest)
    except DefCharError as e:
        print(f"❌ {e}")
        return e.exit_code
    return 0 if ok else 2


if __name__ == '__main__':
    sys.exit(main())
