from __future__ import annotations

from importlib import resources

import pytest

from hcekit import parse_component_config


@pytest.fixture(scope="session")
def kidney_config():
    text = (
        resources.files("hcekit")
        .joinpath("data/kidney_components.json")
        .read_text(encoding="utf-8")
    )
    return parse_component_config(text)
