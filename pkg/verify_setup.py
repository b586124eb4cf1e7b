"""
Verification script to ensure the environment and project layout are usable.
"""

import importlib
import os
import sys
import tempfile

PROJECT_ROOT = os.path.abspath(os.path.dirname(__file__))
sys.path.append(PROJECT_ROOT)

print("=" * 80)
print("RICCI DISC LABORATORY - SETUP VERIFICATION")
print("=" * 80)

problems = 0

# Check dependencies
print("\n1. Checking dependencies...")
for module in ("numpy", "scipy", "pandas", "matplotlib", "statsmodels", "pytest", "sympy"):
    try:
        mod = importlib.import_module(module)
        print(f"   ✅ {module} {getattr(mod, '__version__', '')}")
    except ImportError:
        print(f"   ❌ {module} not installed (pip install -r requirements.txt)")
        problems += 1

# Check the output root
print("\n2. Checking output root...")
import disc_config

root = os.environ.get("RICCI_DISC_OUT", disc_config.OUTPUT_ROOT)
try:
    os.makedirs(root, exist_ok=True)
    with tempfile.NamedTemporaryFile(dir=root):
        pass
    print(f"   ✅ {root} is writable")
except OSError as e:
    print(f"   ❌ {root} is not writable: {e}")
    problems += 1

# Check the package layout
print("\n3. Checking scripts...")
for package in ("grid", "metrics", "flow", "construction", "verification", "analysis", "cli"):
    path = os.path.join(PROJECT_ROOT, "scripts", package)
    if os.path.isdir(path):
        print(f"   ✅ scripts/{package}")
    else:
        print(f"   ❌ scripts/{package} missing")
        problems += 1

# Laplacian smoke test: u = r^2 has Δu = 4 everywhere
print("\n4. Laplacian smoke test...")
try:
    import numpy as np
    from scripts.grid.disc_grid import build_grid
    from scripts.grid.fields import ScalarField, laplacian

    for n_theta in (1, 8):
        grid = build_grid(a=1.0, n_r=32, n_theta=n_theta)
        lap = laplacian(ScalarField(grid, grid.node_r ** 2)).values[grid.interior_mask]
        error = float(np.max(np.abs(lap - 4.0)))
        status = "✅" if error < 1e-8 else "❌"
        problems += error >= 1e-8
        print(f"   {status} n_theta={n_theta}: max |Δ(r²) - 4| = {error:.2e}")
except Exception as e:
    print(f"   ❌ smoke test failed: {e}")
    problems += 1

print("\n" + "=" * 80)
print("VERIFICATION COMPLETE" if not problems else f"VERIFICATION FOUND {problems} PROBLEM(S)")
print("=" * 80)
print("\n📚 Read docs/README.md for detailed documentation")
print("🚀 Run 'python3 run_ricci_disc.py exact bigbang -T 1' for a first trajectory")
print("🧪 Run 'pytest -m \"not slow\"' for the quick test suite")
sys.exit(1 if problems else 0)
