import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in module.CRITERIA:
        if name in module.RESULTS:
            terminalreporter.write_line(module.summary_line(name, module.RESULTS[name]))
