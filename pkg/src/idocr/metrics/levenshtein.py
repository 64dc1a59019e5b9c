"""
Levenshtein edit distance.
"""


def levenshtein(a: str, b: str) -> int:
    """
    Minimal number of single-symbol insertions, deletions and substitutions
    turning a into b. Case sensitive.

    Two-row dynamic programming over the shorter string, so memory is
    O(min(len(a), len(b))).

    Examples:
        levenshtein("", "abc") == 3
        levenshtein("kitten", "sitting") == 3
    """
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)

    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i] + [0] * len(b)
        for j, cb in enumerate(b, 1):
            current[j] = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            )
        previous = current
    return previous[-1]
