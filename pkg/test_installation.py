#!/usr/bin/env python3
"""
Quick test script to verify all dependencies are installed correctly
Run this BEFORE main.py to catch any issues early
"""

import os
import sys


def test_imports():
    """Test all required imports"""
    print("🔍 Testing imports...\n")

    tests_passed = 0
    tests_failed = 0

    imports = [
        ("numpy", "NumPy"),
        ("pandas", "Pandas"),
        ("scipy", "SciPy"),
        ("tqdm", "tqdm"),
        ("pytest", "pytest"),
    ]

    for module, name in imports:
        try:
            __import__(module)
            print(f"  ✅ {name}")
            tests_passed += 1
        except ImportError as e:
            print(f"  ❌ {name} - {e}")
            tests_failed += 1

    return tests_passed, tests_failed


def test_directories():
    """Test required directory structure"""
    print("\n🔍 Testing directory structure...\n")

    packages = ["simulation", "features", "scenarios", "model", "evaluation"]

    tests_passed = 0
    tests_failed = 0

    for package in packages:
        init_file = os.path.join(package, "__init__.py")
        if os.path.isfile(init_file):
            print(f"  ✅ {package}/")
            tests_passed += 1
        else:
            print(f"  ❌ {package}/ - {init_file} not found")
            tests_failed += 1

    return tests_passed, tests_failed


def test_config():
    """Test config file and the shipped JSON configuration"""
    print("\n🔍 Testing configuration...\n")

    try:
        import config
    except ImportError:
        print("  ❌ config.py not found")
        return 0, 1

    tests_passed = 0
    tests_failed = 0

    for var in ["STEP_LENGTH", "SEGMENT_LENGTH", "AGENT_SLOTS", "OUTPUT_DIR", "CHECKPOINT_PATH"]:
        if hasattr(config, var):
            print(f"  ✅ {var} = {getattr(config, var)}")
            tests_passed += 1
        else:
            print(f"  ❌ {var} - Not found in config.py")
            tests_failed += 1

    try:
        cfg = config.load_config("dqjl_config.json")
        print(f"  ✅ dqjl_config.json loads (M = {cfg.train.M}, dt = {cfg.road.dt})")
        tests_passed += 1
    except Exception as e:
        print(f"  ❌ dqjl_config.json failed to load: {e}")
        tests_failed += 1

    return tests_passed, tests_failed


def test_simulation():
    """Quick test of one scenario and a few environment steps"""
    print("\n🔍 Testing simulation (quick test)...\n")

    try:
        import numpy as np
        from scenarios.generator import build_world, generate_scenario
        from simulation.world import step

        spec = generate_scenario(6, 0.5, seed=0)
        world = build_world(spec, 12)
        for _ in range(5):
            world, events = step(world, np.zeros(world.M, dtype=int))
        print(f"  ✅ 5 steps simulated, EMV at x = {world.emv.x:.1f} m")
        return 1, 0
    except Exception as e:
        print(f"  ❌ Simulation failed: {e}")
        return 0, 1


def test_networks():
    """Quick test of a policy forward pass"""
    print("\n🔍 Testing networks...\n")

    try:
        import numpy as np
        from model.networks import PolicyNetwork

        net = PolicyNetwork(np.random.default_rng(0))
        _, probs, _ = net.forward(np.zeros(42), PolicyNetwork.initial_carry(1), record=False)
        ok = np.isclose(probs.sum(), 1.0)
        print(f"  {'✅' if ok else '❌'} policy probabilities {np.round(probs[0], 3)}")
        return (1, 0) if ok else (0, 1)
    except Exception as e:
        print(f"  ❌ Network test failed: {e}")
        return 0, 1


def main():
    """Run all tests"""
    print("=" * 60)
    print("DQJL - INSTALLATION TEST")
    print("=" * 60)
    print()

    total_passed = 0
    total_failed = 0

    for check in (test_imports, test_directories, test_config, test_simulation, test_networks):
        passed, failed = check()
        total_passed += passed
        total_failed += failed

    print("\n" + "=" * 60)
    print("TEST SUMMARY")
    print("=" * 60)
    print(f"\n  Total Passed: {total_passed}")
    print(f"  Total Failed: {total_failed}")

    if total_failed == 0:
        print("\n  ✅ ALL TESTS PASSED!")
        print("  ✅ You're ready to run: python main.py gen")
        print()
        return 0
    else:
        print("\n  ⚠️  SOME TESTS FAILED")
        print("  ⚠️  Please fix the issues above before running main.py")
        print("\n  Common fixes:")
        print("    - Run: pip install -r requirements.txt")
        print("    - Run from the repository root")
        print()
        return 1


if __name__ == "__main__":
    sys.exit(main())
