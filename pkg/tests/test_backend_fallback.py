import subprocess
import sys

SNIPPET = """
import sys
sys.modules["shortpa._ckernels"] = None  # make the extension import fail
from shortpa import apcover, kernels
from shortpa.apcover import APCoverInstance, APTriple
assert kernels.backend() == "python", kernels.backend()
assert kernels.available_backends() == ["python"]
print(apcover.count_apcover(APCoverInstance(1, 5, (APTriple(2, 1, 3),))))
"""


def test_pure_python_fallback():
    proc = subprocess.run([sys.executable, "-c", SNIPPET], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout == "3\n"
