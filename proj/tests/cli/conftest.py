import json
import os
import pathlib
import subprocess

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]
GOLDEN = ROOT / "tests" / "golden"
SCHEMAS = ROOT / "schemas"


def _cli_path():
    env = os.environ.get("UBMAT_CLI")
    if env:
        return pathlib.Path(env)
    return ROOT / "build" / "tools" / "ubmat"


@pytest.fixture(scope="session")
def cli():
    path = _cli_path()
    if not path.exists():
        pytest.skip(f"ubmat executable not found at {path}; set UBMAT_CLI")

    def run(*args, check=None):
        proc = subprocess.run([str(path), *map(str, args)], capture_output=True, text=True)
        if check is not None:
            assert proc.returncode == check, proc.stderr
        return proc

    return run


@pytest.fixture(scope="session")
def golden():
    return GOLDEN


@pytest.fixture(scope="session")
def validate():
    jsonschema = pytest.importorskip("jsonschema")
    referencing = pytest.importorskip("referencing")
    resources = []
    for f in SCHEMAS.glob("*.schema.json"):
        doc = json.loads(f.read_text())
        resources.append((doc["$id"], referencing.Resource.from_contents(doc)))
    registry = referencing.Registry().with_resources(resources)

    def check(instance, name):
        schema = json.loads((SCHEMAS / f"{name}.schema.json").read_text())
        jsonschema.Draft202012Validator(schema, registry=registry).validate(instance)

    return check


def pytest_addoption(parser):
    parser.addoption("--update-goldens", action="store_true", help="Rewrite golden outputs")


@pytest.fixture(scope="session")
def update_goldens(request):
    return request.config.getoption("--update-goldens")
