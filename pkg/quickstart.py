#!/usr/bin/env python3
"""
SteinBounds Quick Start Script

This script checks that the packages import and runs one small example
from each of them.
"""

import sys
import time
import traceback


def test_imports():
    """Test that all required modules can be imported"""
    print("🔍 Testing imports...")

    try:
        import numerics
        print("✅ Numerics engine imported successfully")

        import distribution
        print("✅ Distributions imported successfully")

        import stein_ops
        import representations
        print("✅ Stein operators and representations imported successfully")

        import bounds
        import stein_factors
        print("✅ Bounds and Stein factors imported successfully")

        import cli
        print("✅ CLI imported successfully")

        return True
    except ImportError as e:
        print(f"❌ Import error: {e}")
        print("💡 Try: pip install -r requirements.txt")
        return False


def test_distributions():
    """Builtin targets and their moments"""
    print("\n📐 Testing distributions...")

    try:
        from distribution import BinomialFamily, GammaFamily, make_builtin, validate

        binomial = make_builtin(BinomialFamily(n=20, p=0.2))
        print(f"✅ {binomial.name}: mean {binomial.mean:.4f}, variance {binomial.variance:.4f}")

        gamma = make_builtin(GammaFamily(alpha=1.3, beta=2.4))
        diagnostics = validate(gamma)
        print(f"✅ {gamma.name}: mean {gamma.mean:.4f}, valid {diagnostics.ok}")

        return abs(binomial.variance - 3.2) < 1e-12 and abs(gamma.mean - 3.12) < 1e-12
    except Exception as e:
        print(f"❌ Distribution test failed: {e}")
        traceback.print_exc()
        return False


def test_operators():
    """Stein kernel of the Poisson law"""
    print("\n🧮 Testing Stein operators...")

    try:
        from distribution import PoissonFamily, make_builtin
        from stein_ops import stein_kernel

        poisson = make_builtin(PoissonFamily(lam=3.0))
        tau = stein_kernel(poisson, -1)
        values = [float(tau(k)) for k in range(6)]
        print(f"✅ Backward Stein kernel on 0..5: {[round(v, 10) for v in values]}")

        return all(abs(v - 3.0) < 1e-10 for v in values)
    except Exception as e:
        print(f"❌ Operator test failed: {e}")
        traceback.print_exc()
        return False


def test_bounds():
    """Klaassen equality case and the Gaussian x^4 expansion"""
    print("\n📊 Testing bounds...")

    try:
        from bounds import klaassen_bounds, variance_expansion
        from distribution import NormalFamily, PoissonFamily, make_builtin
        from stein_ops import identity, power

        poisson = make_builtin(PoissonFamily(lam=3.0))
        report = klaassen_bounds(poisson, -1, identity())
        print(f"✅ Poisson(3): {report.lower:.6f} <= {report.oracle_variance:.6f} <= {report.upper:.6f}")

        normal = make_builtin(NormalFamily(mu=0.0, sigma2=1.0))
        expansion = variance_expansion(normal, power(4), 4)
        print(f"✅ Normal x^4 terms: {[round(t, 6) for t in expansion.terms]}")

        return report.equality and abs(expansion.partial_sums[-1] - 96.0) < 1e-6
    except Exception as e:
        print(f"❌ Bounds test failed: {e}")
        traceback.print_exc()
        return False


def test_stein_factors():
    """Gaussian factor at the origin and the Mills chain"""
    print("\n📏 Testing Stein factors...")

    try:
        from distribution import NormalFamily, make_builtin
        from stein_factors import factor_R, mills_bounds_gaussian

        normal = make_builtin(NormalFamily(mu=0.0, sigma2=1.0))
        r0 = factor_R(normal, 0, 0.0)
        print(f"✅ R(0) = {r0:.6f}")

        chain = mills_bounds_gaussian(3.0)
        print(f"✅ Mills chain at x=3 holds: {chain.holds}")

        return abs(r0 - 0.626657) < 1e-5 and chain.holds
    except Exception as e:
        print(f"❌ Stein factor test failed: {e}")
        traceback.print_exc()
        return False


def test_cli():
    """Parse a run spec and emit a factor grid"""
    print("\n🖥️ Testing CLI spec...")

    try:
        from cli import RunSpec, SteinBoundsRunner, render_csv

        spec = RunSpec.build(command="factors", distribution="normal:0,1", grid="-1:1:0.5", output="csv")
        report = SteinBoundsRunner(spec).factors_cli()
        print(render_csv(report).strip())
        print(f"✅ Factor grid with {len(report.rows)} rows")

        return len(report.rows) == 5
    except Exception as e:
        print(f"❌ CLI test failed: {e}")
        traceback.print_exc()
        return False


def main():
    """Run all quick start tests"""
    print("🧮 SteinBounds Quick Start Test")
    print("=" * 50)

    tests = [
        ("Imports", test_imports),
        ("Distributions", test_distributions),
        ("Operators", test_operators),
        ("Bounds", test_bounds),
        ("Stein Factors", test_stein_factors),
        ("CLI", test_cli),
    ]

    passed = 0
    failed = 0

    start_time = time.time()

    for test_name, test_func in tests:
        try:
            if test_func():
                passed += 1
            else:
                failed += 1
        except Exception as e:
            print(f"❌ {test_name} test encountered an error: {e}")
            failed += 1

    end_time = time.time()

    print("\n" + "=" * 50)
    print(f"🏁 Test Results:")
    print(f"   ✅ Passed: {passed}")
    print(f"   ❌ Failed: {failed}")
    print(f"   ⏱️ Total time: {end_time - start_time:.2f} seconds")

    if failed == 0:
        print("\n🎉 All tests passed! SteinBounds is ready to use.")
        print("\n💡 Next steps:")
        print("   1. Run 'python main.py verify --quick' for the property suite")
        print("   2. Run 'python main.py expand --dist normal:0,1 --g x^4 --n 4'")
        print("   3. Run 'pytest' for the unit tests")
        return 0
    else:
        print(f"\n⚠️ {failed} test(s) failed. Please check the errors above.")
        print("\n💡 Common solutions:")
        print("   1. Install dependencies: pip install -r requirements.txt")
        print("   2. Check Python version: python --version (requires 3.9+)")
        return 1


if __name__ == "__main__":
    sys.exit(main())
