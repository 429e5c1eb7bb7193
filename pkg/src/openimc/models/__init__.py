"""Bundled example models."""

from importlib import resources

from ..model import Imc
from ..parser import ModelDocument, parse_model


def load_document(name: str) -> ModelDocument:
    text = resources.files(__name__).joinpath(f"{name}.imc").read_text(encoding="utf-8")
    return parse_model(text)


def load(name: str) -> Imc:
    return load_document(name).to_imc()
