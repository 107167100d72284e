#!/usr/bin/env python3
"""
Ringforge - System Smoke Test
Checks imports, shipped data files and one quick pass through each subsystem.
Runs standalone (python test_system.py) or under pytest.
"""

import sys
from pathlib import Path

ROOT = Path(__file__).parent


class TestRunner:
    __test__ = False

    def __init__(self):
        self.passed = 0
        self.failed = 0
        self.tests = []

    def test(self, name, func):
        """Run a test and track results."""
        try:
            print(f"\n🧪 Testing: {name}")
            func()
            print("   ✅ PASSED")
            self.passed += 1
            return True
        except Exception as e:
            print(f"   ❌ FAILED: {e}")
            self.failed += 1
            return False

    def summary(self):
        """Print test summary."""
        total = self.passed + self.failed
        print(f"\n{'='*60}")
        print(f"TEST RESULTS: {self.passed}/{total} passed")
        print(f"{'='*60}")
        if self.failed > 0:
            print(f"⚠️  {self.failed} tests failed")
            return False
        print("✅ All tests passed!")
        return True


runner = TestRunner()

# ==================== TESTS ====================


def test_imports():
    """Test all imports."""
    try:
        from instance_model_module import load_instance, validate_instance
        from lattice_module import POINT_GROUP, cell_at
        from patch_engine_module import Patch, enumerate_completions
        from classification_module import classify_window, generate_window
        from puzzle_space_module import valuation, isolation_radius
        from ring_complex_module import build_complex, check_type
        from development_module import cylinder_search, unique_embeddability_check
        from density_sim_module import landau_g, simulate_density_event
        from render_module import render_patch
        print("   All imports successful")
    except ImportError as e:
        raise Exception(f"Import failed: {e}")


def test_file_structure():
    """Test that required files exist."""
    required_files = [
        "config.py",
        "errors_module.py",
        "instance_model_module.py",
        "lattice_module.py",
        "patch_engine_module.py",
        "classification_module.py",
        "puzzle_space_module.py",
        "ring_complex_module.py",
        "development_module.py",
        "density_sim_module.py",
        "render_module.py",
        "main.py",
        "data/autf2.ring",
        "data/explicit_complex.cx",
    ]

    for file in required_files:
        if not (ROOT / file).exists():
            raise FileNotFoundError(f"Missing required file: {file}")

    print(f"   Found all {len(required_files)} required files")


def test_configuration():
    """Test configuration defaults."""
    import config

    assert config.UNITS_PER_TURN == 6
    assert config.search_budget() > 0
    assert config.DEFAULT_INSTANCE_FILE.exists()
    print(f"   Search budget {config.search_budget()}, census radius <= {config.MAX_CENSUS_RADIUS}")


def test_shipped_instance():
    """Test the shipped instance parses and validates."""
    from instance_model_module import load_instance, validate_instance

    inst = load_instance()
    report = validate_instance(inst)
    if not report.passed:
        raise Exception(f"instance fails validation: {[c.name for c in report.checks if not c.passed]}")
    assert inst.theta0 == 3
    print(f"   {len(inst.shapes)} shapes, {len(inst.rings)} rings, theta0 = {inst.theta0}")


def test_shipped_complex():
    """Test the shipped complex parses with three vertices."""
    from ring_complex_module import load_complex

    X = load_complex(colour=False)
    assert len(X.vertices) == 3
    assert len(X.faces) == 20
    print(f"   {X!r}")


def test_window_generation():
    """Test a diamond plane window round-trips through the classifier."""
    from classification_module import classify_window, default_type, generate_window

    window = generate_window(default_type("diamond_plane"), 2)
    tags = [m.type.tag for m in classify_window(window)]
    assert "diamond_plane" in tags
    print(f"   {len(window.patch)} pieces, classes {tags}")


def test_density_arithmetic():
    """Test the Landau function and the exact density value."""
    from density_sim_module import exact_density_event, landau_g

    assert landau_g(5) == 6
    assert abs(exact_density_event(10_000, 0.5, 10) - 0.999 ** 100) < 1e-12
    print("   Landau g(5) = 6, exact density value matches")


def test_error_hierarchy():
    """Test every error derives from the common base."""
    import errors_module

    base = errors_module.RingforgeError
    for name in ("InstanceSyntaxError", "OverlapError", "BudgetExceededError",
                 "LemmaMismatchError", "InconsistentSpecError", "DensityParamError", "RenderError"):
        assert issubclass(getattr(errors_module, name), base), name
    print("   Error classes share RingforgeError")


# ==================== RUN TESTS ====================

if __name__ == "__main__":
    print("\n" + "="*60)
    print("RINGFORGE - TEST SUITE")
    print("="*60)

    runner.test("Imports", test_imports)
    runner.test("File Structure", test_file_structure)
    runner.test("Configuration", test_configuration)
    runner.test("Shipped Instance", test_shipped_instance)
    runner.test("Shipped Complex", test_shipped_complex)
    runner.test("Window Generation", test_window_generation)
    runner.test("Density Arithmetic", test_density_arithmetic)
    runner.test("Error Hierarchy", test_error_hierarchy)

    success = runner.summary()

    if success:
        print("\n" + "🎉 "*30)
        print("\nRingforge is ready to use!")
        print("\nNext steps:")
        print("1. Validate the instance: python main.py validate")
        print("2. Run the certificates: python main.py lemmas")
        print("3. Check the shipped complex: python main.py complex check")
        print("\nFull suite: pytest (add -m slow for the long searches)")
    else:
        print("\n⚠️  Some tests failed. Please check the errors above.")
        sys.exit(1)
