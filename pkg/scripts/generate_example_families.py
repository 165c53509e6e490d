"""Regenerate the example families shipped under src/amenability/data/.

    python3 scripts/generate_example_families.py
"""

from pathlib import Path

from amenability.group_core import sl2_permutations
from amenability.io import write_permutation_group

DATA = Path(__file__).resolve().parents[1] / "src" / "amenability" / "data"
SL2_PRIMES = (3, 5, 7, 11, 13, 17)
CYCLIC_ORDERS = (10, 20, 40, 80)


def write_family(directory: Path, members: dict[str, list[list[int]]], comment: str) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for name, perms in members.items():
        write_permutation_group(directory / f"{name}.perm", perms)
    lines = [f"# {comment}", *(f"{name}.perm" for name in members)]
    (directory / "family.txt").write_text("\n".join(lines) + "\n")


def main() -> None:
    write_family(
        DATA / "sl2",
        {f"sl2_{p}": sl2_permutations(p) for p in SL2_PRIMES},
        "SL(2,p) on nonzero vectors of F_p^2, generators [[1,2],[0,1]] and [[1,0],[2,1]]",
    )
    write_family(
        DATA / "cyclic",
        {f"z{n}": [[(i + 1) % n for i in range(n)]] for n in CYCLIC_ORDERS},
        "Z/n as the n-cycle",
    )


if __name__ == "__main__":
    main()
