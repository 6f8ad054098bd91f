def pytest_terminal_summary(terminalreporter):
    # the acceptance tests print one verdict line each; show them even when output is captured
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if getattr(rep, "when", "") == "call" and "test_acceptance" in rep.nodeid:
                lines += [ln for ln in rep.capstdout.splitlines() if ln.startswith("criterion=")]
    if lines:
        terminalreporter.section("acceptance criteria")
        for ln in sorted(lines, key=lambda s: int(s.split()[0].split("=")[1])):
            terminalreporter.write_line(ln)
