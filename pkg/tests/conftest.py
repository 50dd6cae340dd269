import sys


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    if mod is None or not getattr(mod, "OUTCOMES", None):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.OUTCOMES):
        terminalreporter.write_line(mod.format_line(n))
