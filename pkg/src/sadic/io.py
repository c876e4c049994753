"""JSON input: substitution files and directive-sequence descriptions.

Substitution::

    {"alphabet": ["a", "b"], "rules": {"a": "ab", "b": "ba"}}

Images are strings of single-character symbols or arrays of symbol names.
An optional ``"codomain"`` gives a different target alphabet.

Directive sequence::

    {"kind": "stationary", "substitution": {...}, "horizon": 40}
    {"kind": "construction_A", "d": 3, "levels": 20}
    {"kind": "construction_B", "d": 3, "levels": 60}
    {"kind": "explicit", "terms": [{...}, {...}]}
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from .errors import ParseError
from .words import Alphabet, Substitution


Source = Union[str, Path, dict]


def _read(source: Source) -> dict:
    if isinstance(source, dict):
        return source
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    return data


def substitution_from_dict(data: dict) -> Substitution:
    try:
        alphabet = data["alphabet"]
        rules = data["rules"]
    except (KeyError, TypeError):
        raise ParseError('substitution needs "alphabet" and "rules"') from None
    if isinstance(alphabet, str):
        alphabet = list(alphabet)
    if not isinstance(alphabet, list) or not isinstance(rules, dict):
        raise ParseError('"alphabet" must be a list and "rules" an object')
    codomain = data.get("codomain")
    if isinstance(codomain, str):
        codomain = list(codomain)
    return Substitution.from_rules(Alphabet(tuple(alphabet)), rules,
                                   None if codomain is None else Alphabet(tuple(codomain)))


def substitution_to_dict(sigma: Substitution) -> dict:
    out = {"alphabet": list(sigma.domain.letters)}
    if sigma.codomain.single_char:
        out["rules"] = {sigma.domain.letters[a]: sigma.codomain.format(img)
                        for a, img in enumerate(sigma.images)}
    else:
        out["rules"] = {sigma.domain.letters[a]: [sigma.codomain.letters[x] for x in img]
                        for a, img in enumerate(sigma.images)}
    if not sigma.is_endomorphism:
        out["codomain"] = list(sigma.codomain.letters)
    return out


def load_substitution(source: Source) -> Substitution:
    return substitution_from_dict(_read(source))


def is_directive(data: dict) -> bool:
    return "kind" in data


def directive_from_dict(data: dict):
    from .constructions import build_construction_A, build_construction_B
    from .directive import DirectiveSequence

    kind = data.get("kind")
    try:
        if kind == "stationary":
            return DirectiveSequence.stationary(substitution_from_dict(data["substitution"]),
                                                data.get("horizon"))
        if kind == "construction_A":
            return build_construction_A(int(data["d"]), int(data.get("levels", 20)))
        if kind == "construction_B":
            return build_construction_B(int(data["d"]), int(data.get("levels", 20)))
        if kind == "explicit":
            return DirectiveSequence.explicit([substitution_from_dict(t) for t in data["terms"]])
    except KeyError as exc:
        raise ParseError(f"directive sequence of kind {kind!r} misses {exc}") from None
    raise ParseError(f"unknown directive sequence kind {kind!r}")


def load_directive(source: Source):
    data = _read(source)
    if not is_directive(data):
        from .directive import DirectiveSequence
        return DirectiveSequence.stationary(substitution_from_dict(data))
    return directive_from_dict(data)


def load_input(source: Source):
    """A Substitution, or a DirectiveSequence when the file has a ``"kind"``."""
    data = _read(source)
    return directive_from_dict(data) if is_directive(data) else substitution_from_dict(data)


def fixture_path(name: str) -> Path:
    """Path of a fixture shipped with the package (without the .json suffix)."""
    base = Path(__file__).parent / "fixtures"
    p = base / (name if name.endswith(".json") else name + ".json")
    if not p.exists():
        raise ParseError(f"no fixture named {name!r}")
    return p


def fixture_names() -> list:
    base = Path(__file__).parent / "fixtures"
    return sorted(p.stem for p in base.glob("*.json") if p.stem != "golden")


def load_fixture(name: str) -> Substitution:
    return load_substitution(fixture_path(name))
