"""End-to-end verification report, as produced by ``wplstokes verify``."""

from __future__ import annotations

from wplstokes.report import content_hash, report_text, run_verify

for a in [(1, 2, 2), (2, 3, 4)]:
    report = run_verify(a, q=1.0, seed=0)
    print(report_text(report))
    print(f"exit code {report.exit_code}, content hash {content_hash(report)[:16]}\n")
