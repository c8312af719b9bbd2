"""Prints one PASS/FAIL line per acceptance criterion at the end of the run."""


def pytest_terminal_summary(terminalreporter):
    rows = []
    for status in ("passed", "failed"):
        for rep in terminalreporter.stats.get(status, []):
            if rep.when != "call":
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                rows.append((props["criterion"], "PASS" if status == "passed" else "FAIL",
                             props.get("detail", "")))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict, detail in sorted(rows):
        terminalreporter.write_line(f"{verdict}  {name}  {detail}")
