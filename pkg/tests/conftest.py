import json

import pytest

from edgebench import ModelDescriptor, ProcessorProfile, SynthScenario, reference_registry

# Published constants: datasheet deep-sleep currents and the supply rail.
DATASHEET_IDLE_MA = {"cortex-m0plus": 4.20, "cortex-m4": 0.30, "cortex-m7": 1.60}
SUPPLY_VOLTAGE = 3.3


@pytest.fixture
def registry():
    return reference_registry()


@pytest.fixture
def m4():
    # RAM/ROM capacities are placeholders, not published values.
    return ProcessorProfile("cortex-m4", idle_current=0.30, supply_voltage=3.3, ram_capacity=262144, rom_capacity=1048576)


@pytest.fixture
def m7():
    # RAM/ROM capacities are placeholders, not published values.
    return ProcessorProfile("cortex-m7", idle_current=1.60, supply_voltage=3.3, ram_capacity=1048576, rom_capacity=4194304)


def make_model(id="lenet5", **kw):
    defaults = dict(
        use_case="digit_recognition",
        params=140000,
        flops=1e6,
        ram_bytes=10_000,
        rom_bytes=100_000,
        quality=0.97,
        quality_kind="accuracy",
        quantized=True,
    )
    defaults.update(kw)
    return ModelDescriptor(id=id, **defaults)


def make_scenario(**kw):
    defaults = dict(
        processor_id="cortex-m4",
        model_id="lenet5",
        true_inference_time=0.01,
        true_active_current=10.0,
        true_idle_current=1.0,
        inferences_per_window=10,
        n_windows=3,
        idle_gap=0.05,
        sample_rate=10_000.0,
        noise_sigma=0.0,
        seed=7,
    )
    defaults.update(kw)
    return SynthScenario(**defaults)


def write_json(path, doc):
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


# Two-core scenario for the end-to-end flow. The fast core (datasheet M7 idle
# current) finishes inferences about 30x sooner, the low-idle core (datasheet M4
# idle current) draws far less between inferences. For the cheapest model the
# energy lines cross near 0.84 s, so the fast core wins at 0.5 s and the
# low-idle core at 5.0 s.
FLIP_CORES = {
    "cortex-m7": dict(slope=2e-9, intercept=1e-3, active=30.0),
    "cortex-m4": dict(slope=5e-8, intercept=0.05, active=12.0),
}
FLIP_MODELS = [
    ("kws_tiny", 1e6, 0.82),
    ("kws_small", 2e6, 0.85),
    ("kws_base", 4e6, 0.88),
    ("kws_wide", 6e6, 0.90),
    ("kws_deep", 8e6, 0.91),
    ("kws_large", 1e7, 0.93),
]


def flip_registry_doc():
    return {
        "schema_version": "1.0",
        "processors": [
            {"id": pid, "idle_current": DATASHEET_IDLE_MA[pid], "supply_voltage": SUPPLY_VOLTAGE,
             "ram_capacity": 262144, "rom_capacity": 1048576}
            for pid in sorted(FLIP_CORES)
        ],
        "models": [
            {"id": mid, "use_case": "keyword_spotting", "params": 50000, "flops": flops, "ram_bytes": 20000,
             "rom_bytes": 60000, "quality": q, "quality_kind": "accuracy", "quantized": True}
            for mid, flops, q in FLIP_MODELS
        ],
        "targets": [{"use_case": "keyword_spotting", "quality_threshold": 0.8, "quality_kind": "accuracy"}],
    }


def flip_scenarios_doc(noise_sigma=0.05):
    scenarios = []
    for pid, core in sorted(FLIP_CORES.items()):
        for i, (mid, flops, _) in enumerate(FLIP_MODELS):
            scenarios.append(
                {
                    "processor_id": pid,
                    "model_id": mid,
                    "true_inference_time": core["slope"] * flops + core["intercept"],
                    "true_active_current": core["active"],
                    "true_idle_current": DATASHEET_IDLE_MA[pid],
                    "inferences_per_window": 3,
                    "n_windows": 2,
                    "idle_gap": 0.02,
                    "sample_rate": 5000.0,
                    "noise_sigma": noise_sigma,
                    "seed": 100 + i,
                }
            )
    return {"scenarios": scenarios}


# Acceptance-criterion outcomes, printed in the terminal summary.
_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    def record(number: int, title: str, ok: bool, detail: str = "") -> bool:
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
