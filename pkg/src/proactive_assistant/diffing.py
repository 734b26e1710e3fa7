"""Line-level diffs between current and proposed code.

``compute_diff`` produces a minimal edit script from a longest-common-
subsequence match on lines; ``apply_hunks`` replays any subset of those
hunks against the original text. Both are pure functions. Line splitting
treats the empty string as zero lines so join(split(x)) == x holds for
every input.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ContractError


def split_lines(text: str) -> list[str]:
    if not text:
        return []
    return text.split("\n")


def join_lines(lines: list[str]) -> str:
    return "\n".join(lines)


@dataclass(frozen=True)
class DiffHunk:
    """One contiguous change.

    ``old_start``/``new_start`` are 1-based. A pure insertion has
    old_len == 0 and old_start pointing at the original line the added
    block precedes (len(original)+1 for an append).
    """

    old_start: int
    old_len: int
    new_start: int
    new_len: int
    removed_lines: tuple[str, ...]
    added_lines: tuple[str, ...]

    def to_payload(self) -> dict:
        return {
            "old_start": self.old_start,
            "old_len": self.old_len,
            "new_start": self.new_start,
            "new_len": self.new_len,
            "removed": list(self.removed_lines),
            "added": list(self.added_lines),
        }

    @classmethod
    def from_payload(cls, data: dict) -> "DiffHunk":
        return cls(
            old_start=int(data["old_start"]),
            old_len=int(data["old_len"]),
            new_start=int(data["new_start"]),
            new_len=int(data["new_len"]),
            removed_lines=tuple(data["removed"]),
            added_lines=tuple(data["added"]),
        )


def compute_diff(original: str, proposed: str) -> list[DiffHunk]:
    """Minimal line diff; identical texts give an empty list."""
    if original == proposed:
        return []
    a = split_lines(original)
    b = split_lines(proposed)

    # Common prefix/suffix always extend to an optimal LCS, so strip them
    # before the quadratic part.
    n, m = len(a), len(b)
    lo = 0
    while lo < n and lo < m and a[lo] == b[lo]:
        lo += 1
    hi = 0
    while hi < n - lo and hi < m - lo and a[n - 1 - hi] == b[m - 1 - hi]:
        hi += 1
    core_a = a[lo : n - hi]
    core_b = b[lo : m - hi]

    hunks = _diff_core(core_a, core_b, lo)
    return hunks


def _diff_core(a: list[str], b: list[str], offset: int) -> list[DiffHunk]:
    n, m = len(a), len(b)
    # dp[i][j] = LCS length of a[i:], b[j:]
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row = dp[i]
        nxt = dp[i + 1]
        ai = a[i]
        for j in range(m - 1, -1, -1):
            if ai == b[j]:
                row[j] = nxt[j + 1] + 1
            else:
                down = nxt[j]
                right = row[j + 1]
                row[j] = down if down >= right else right

    hunks: list[DiffHunk] = []
    removed: list[str] = []
    added: list[str] = []
    hunk_i = hunk_j = 0
    i = j = 0

    def flush() -> None:
        if removed or added:
            hunks.append(
                DiffHunk(
                    old_start=offset + hunk_i + 1,
                    old_len=len(removed),
                    new_start=offset + hunk_j + 1,
                    new_len=len(added),
                    removed_lines=tuple(removed),
                    added_lines=tuple(added),
                )
            )
            removed.clear()
            added.clear()

    while i < n and j < m:
        if a[i] == b[j] and dp[i][j] == dp[i + 1][j + 1] + 1:
            flush()
            i += 1
            j += 1
            hunk_i, hunk_j = i, j
        elif dp[i + 1][j] >= dp[i][j + 1]:
            removed.append(a[i])
            i += 1
        else:
            added.append(b[j])
            j += 1
    removed.extend(a[i:])
    added.extend(b[j:])
    flush()
    return hunks


def apply_hunks(original: str, hunks: list[DiffHunk]) -> str:
    """Apply a subset of hunks computed against exactly this original.

    Hunks are checked against the text as they apply: overlapping
    ranges, out-of-bounds indices, or removed-line mismatches raise
    ContractError rather than corrupting the document.
    """
    lines = split_lines(original)
    out: list[str] = []
    cursor = 0
    for hunk in sorted(hunks, key=lambda h: (h.old_start, h.new_start)):
        start = hunk.old_start - 1
        end = start + hunk.old_len
        if start < cursor or end > len(lines):
            raise ContractError(f"hunk at old line {hunk.old_start} overlaps or exceeds the text")
        if tuple(lines[start:end]) != hunk.removed_lines:
            raise ContractError(f"hunk at old line {hunk.old_start} does not match the text")
        out.extend(lines[cursor:start])
        out.extend(hunk.added_lines)
        cursor = end
    out.extend(lines[cursor:])
    return join_lines(out)
