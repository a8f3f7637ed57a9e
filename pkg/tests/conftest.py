def pytest_terminal_summary(terminalreporter):
    """Print one PASS/FAIL line per acceptance criterion check."""
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call":
                continue
            for key, value in rep.user_properties:
                if key == "criterion":
                    lines.append((value, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for label, status in sorted(lines):
            terminalreporter.write_line(f"{status}  {label}")
