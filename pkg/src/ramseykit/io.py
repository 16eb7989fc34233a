"""Text formats for structures, colorings, tree sets, sequences, elements,
and formulas, plus JSON run reports.

All formats are line-based UTF-8 with LF endings; serialization normalizes
(sorted tuples, sorted nodes) so that parse-serialize round-trips are
byte-identical on normalized input.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import __version__
from .arrows import Coloring
from .formulas import (And, BOTTOM, ColorEq, Eq, Exists, Formula, Not, Or,
                       Rel, TOP, implies)
from .structures import FinStructure, Signature, canonical_code, structure_from_code
from .trees import node_sort_key
from .ultra import (ChainRule, ColoringRule, ConstantColoring,
                    DevlinChainColoring, PerCoordColorings,
                    PerturbedConstantColoring, StructureSequence, UltraElement)


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")


# ---------------------------------------------------------------------------
# Structures


_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def parse_signature(text: str, line: int | None = None) -> Signature:
    rels = []
    for part in text.replace(",", " ").split():
        if "/" not in part:
            raise FormatError(f"expected name/arity, got {part!r}", line)
        name, _, arity = part.partition("/")
        if not _NAME_RE.match(name):
            raise FormatError(f"bad relation name {name!r}", line)
        if not arity.isdigit() or int(arity) < 1:
            raise FormatError(f"bad arity {arity!r} for {name}", line)
        rels.append((name, int(arity)))
    return Signature(tuple(rels))


def format_signature(sig: Signature) -> str:
    return " ".join(f"{name}/{arity}" for name, arity in sig.relations)


def _parse_structure_lines(lines: Sequence[tuple[int, str]]) -> FinStructure:
    if not lines:
        raise FormatError("empty structure block")
    ln, header = lines[0]
    if not header.startswith("signature"):
        raise FormatError("structure block must start with 'signature ...'", ln)
    sig = parse_signature(header[len("signature"):], ln)
    if len(lines) < 2:
        raise FormatError("missing 'structure size=N' line", ln)
    ln2, sizeline = lines[1]
    m = re.fullmatch(r"structure size=(\d+)", sizeline)
    if not m:
        raise FormatError(f"expected 'structure size=N', got {sizeline!r}", ln2)
    size = int(m.group(1))
    interps: dict[str, list[tuple[int, ...]]] = {}
    for ln3, body in lines[2:]:
        name, sep, rest = body.partition(":")
        name = name.strip()
        if not sep or name not in sig.names:
            raise FormatError(f"unknown relation line {body!r}", ln3)
        arity = sig.arity(name)
        tuples = []
        for chunk in re.findall(r"\(([^)]*)\)", rest):
            entries = [e.strip() for e in chunk.split(",") if e.strip() != ""]
            if len(entries) != arity:
                raise FormatError(f"tuple ({chunk}) has arity {len(entries)}, "
                                  f"expected {arity}", ln3)
            try:
                t = tuple(int(e) for e in entries)
            except ValueError:
                raise FormatError(f"non-integer entry in ({chunk})", ln3) from None
            if any(not (0 <= x < size) for x in t):
                raise FormatError(f"entry out of range in ({chunk})", ln3)
            tuples.append(t)
        interps.setdefault(name, []).extend(tuples)
    try:
        return FinStructure.make(sig, size, interps)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def parse_structure(text: str) -> FinStructure:
    lines = [(i + 1, line.strip()) for i, line in enumerate(text.splitlines())
             if line.strip()]
    return _parse_structure_lines(lines)


def serialize_structure(s: FinStructure) -> str:
    out = [f"signature {format_signature(s.signature)}",
           f"structure size={s.size}"]
    for (name, _), tuples in zip(s.signature.relations, s.interpretations):
        if not tuples:
            continue
        body = " ".join("(" + ",".join(str(x) for x in t) + ")" for t in sorted(tuples))
        out.append(f"{name}: {body}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Colorings


def serialize_coloring(c: Coloring) -> str:
    out = [f"coloring k={c.k} pattern={canonical_code(c.pattern).hex()}"]
    for copy, color in zip(c.copies, c.assignments):
        out.append("copy: " + " ".join(str(i) for i in copy) + f" -> {color}")
    return "\n".join(out) + "\n"


def parse_coloring(text: str, ambient: FinStructure, pattern: FinStructure) -> Coloring:
    lines = [(i + 1, line.strip()) for i, line in enumerate(text.splitlines())
             if line.strip()]
    if not lines:
        raise FormatError("empty coloring")
    ln, header = lines[0]
    m = re.fullmatch(r"coloring k=(\d+) pattern=([0-9a-f]+)", header)
    if not m:
        raise FormatError(f"bad coloring header {header!r}", ln)
    k = int(m.group(1))
    if bytes.fromhex(m.group(2)) != canonical_code(pattern):
        raise FormatError("pattern code does not match the given pattern", ln)
    colors = {}
    for ln2, body in lines[1:]:
        m = re.fullmatch(r"copy:\s*([\d ]+)\s*->\s*(\d+)", body)
        if not m:
            raise FormatError(f"bad coloring line {body!r}", ln2)
        copy = tuple(int(x) for x in m.group(1).split())
        colors[copy] = int(m.group(2))
    return Coloring.from_mapping(ambient, pattern, k, colors)


# ---------------------------------------------------------------------------
# Tree sets


def parse_tree_set(text: str) -> frozenset[str]:
    nodes = set()
    for i, raw in enumerate(text.splitlines()):
        line = raw.strip()
        if not line:
            continue
        if line == "e":
            nodes.add("")
        elif set(line) <= {"0", "1"}:
            nodes.add(line)
        else:
            raise FormatError(f"bad node {line!r}", i + 1)
    if not nodes:
        raise FormatError("empty tree set")
    return frozenset(nodes)


def serialize_tree_set(nodes: Iterable[str]) -> str:
    ordered = sorted(set(nodes), key=node_sort_key)
    return "\n".join(n if n else "e" for n in ordered) + "\n"


# ---------------------------------------------------------------------------
# Sequences, elements, coloring rules


def parse_sequence(text: str) -> StructureSequence:
    lines = text.splitlines()
    header_idx = None
    for i, raw in enumerate(lines):
        if raw.strip():
            header_idx = i
            break
    if header_idx is None:
        raise FormatError("empty sequence file")
    header = lines[header_idx].strip()
    m = re.fullmatch(
        r"seq signature=(\S+) prefix=(\d+) rule=chain\((\d+)\*t\+(\d+)\)", header)
    if not m:
        raise FormatError(f"bad sequence header {header!r}", header_idx + 1)
    sig = parse_signature(m.group(1), header_idx + 1)
    prefix_len = int(m.group(2))
    a, b = int(m.group(3)), int(m.group(4))
    blocks: list[list[tuple[int, str]]] = []
    current: list[tuple[int, str]] = []
    for i in range(header_idx + 1, len(lines)):
        line = lines[i].strip()
        if not line:
            if current:
                blocks.append(current)
                current = []
            continue
        current.append((i + 1, line))
    if current:
        blocks.append(current)
    if len(blocks) != prefix_len:
        raise FormatError(f"expected {prefix_len} prefix blocks, found {len(blocks)}")
    prefix = tuple(_parse_structure_lines(block) for block in blocks)
    seq = StructureSequence(sig, prefix, ChainRule(a, b))
    return seq


def serialize_sequence(seq: StructureSequence) -> str:
    rule = seq.rule
    if not isinstance(rule, ChainRule):
        raise FormatError("only chain rules have a file form")
    out = (f"seq signature={format_signature(seq.signature)} "
           f"prefix={seq.prefix_len} rule=chain({rule.a}*t+{rule.b})")
    parts = [out]
    for s in seq.prefix:
        parts.append("")
        parts.append(serialize_structure(s).rstrip("\n"))
    return "\n".join(parts) + "\n"


def parse_elements(text: str) -> tuple[UltraElement, ...]:
    out = []
    for i, raw in enumerate(text.splitlines()):
        line = raw.strip()
        if not line:
            continue
        head, _, prefix_part = line.partition(" prefix ")
        prefix = tuple(int(x) for x in prefix_part.split()) if prefix_part else ()
        words = head.split()
        try:
            if words[0] == "const" and len(words) == 2:
                out.append(UltraElement.const_index(int(words[1]), prefix))
            elif words[0] == "min" and len(words) == 1:
                out.append(UltraElement.minimum())
            elif words[0] == "max" and len(words) == 1:
                out.append(UltraElement.maximum())
            elif words[0] == "scaled" and len(words) == 2:
                num, _, den = words[1].partition("/")
                out.append(UltraElement.scaled(int(num), int(den or "1"), prefix))
            else:
                raise FormatError(f"bad element line {line!r}", i + 1)
        except ValueError as exc:
            raise FormatError(f"bad element line {line!r}: {exc}", i + 1) from exc
    if not out:
        raise FormatError("empty element file")
    return tuple(out)


def parse_coloring_rules(text: str, signature: Signature) -> PerCoordColorings:
    lines = [(i + 1, line.strip()) for i, line in enumerate(text.splitlines())
             if line.strip()]
    if not lines:
        raise FormatError("empty coloring rule file")
    ln, header = lines[0]
    m = re.fullmatch(r"colorings k=(\d+) pattern=([0-9a-f]+)(?: exclude=([\d,]+))?",
                     header)
    if not m:
        raise FormatError(f"bad colorings header {header!r}", ln)
    k = int(m.group(1))
    pattern = structure_from_code(signature, bytes.fromhex(m.group(2)))
    excluded = frozenset(int(x) for x in m.group(3).split(",")) if m.group(3) else frozenset()
    if len(lines) != 2:
        raise FormatError("expected exactly one rule line")
    ln2, body = lines[1]
    words = body.split()
    rule: ColoringRule
    if words[:2] == ["rule", "constant"] and len(words) == 3:
        rule = ConstantColoring(int(words[2]))
    elif words[:2] == ["rule", "perturbed"] and len(words) >= 3:
        overrides = []
        for chunk in words[3:]:
            t, _, c = chunk.partition(":")
            overrides.append((int(t), int(c)))
        rule = PerturbedConstantColoring(int(words[2]), tuple(overrides))
    elif words[:2] == ["rule", "by-devlin"] and len(words) == 3:
        rule = DevlinChainColoring(int(words[2]))
    else:
        raise FormatError(f"bad rule line {body!r}", ln2)
    return PerCoordColorings(pattern, k, rule, excluded)


# ---------------------------------------------------------------------------
# Formulas (s-expressions)


_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")


def _tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


def _read_sexp(tokens: list[str], pos: int):
    if pos >= len(tokens):
        raise FormatError("unexpected end of formula")
    tok = tokens[pos]
    if tok == "(":
        out = []
        pos += 1
        while pos < len(tokens) and tokens[pos] != ")":
            node, pos = _read_sexp(tokens, pos)
            out.append(node)
        if pos >= len(tokens):
            raise FormatError("unbalanced parentheses")
        return out, pos + 1
    if tok == ")":
        raise FormatError("unexpected ')'")
    return tok, pos + 1


def _var(tok) -> int:
    if isinstance(tok, str) and re.fullmatch(r"x\d+", tok):
        return int(tok[1:])
    raise FormatError(f"expected a variable like x0, got {tok!r}")


def _to_formula(node) -> Formula:
    if node == "true":
        return TOP
    if node == "false":
        return BOTTOM
    if not isinstance(node, list) or not node:
        raise FormatError(f"bad formula term {node!r}")
    head = node[0]
    if head == "rel":
        if len(node) < 3:
            raise FormatError("(rel NAME vars...) needs arguments")
        return Rel(node[1], tuple(_var(v) for v in node[2:]))
    if head == "eq":
        if len(node) != 3:
            raise FormatError("(eq a b) takes two variables")
        return Eq(_var(node[1]), _var(node[2]))
    if head == "color":
        if len(node) < 3:
            raise FormatError("(color J vars...) needs arguments")
        return ColorEq(tuple(_var(v) for v in node[2:]), int(node[1]))
    if head == "not":
        return Not(_to_formula(node[1]))
    if head == "and":
        return And(tuple(_to_formula(p) for p in node[1:]))
    if head == "or":
        return Or(tuple(_to_formula(p) for p in node[1:]))
    if head == "implies":
        if len(node) != 3:
            raise FormatError("(implies a b) takes two formulas")
        return implies(_to_formula(node[1]), _to_formula(node[2]))
    if head == "exists":
        if len(node) != 3 or not isinstance(node[1], list):
            raise FormatError("(exists (vars) body)")
        return Exists(tuple(_var(v) for v in node[1]), _to_formula(node[2]))
    raise FormatError(f"unknown formula head {head!r}")


def parse_formula(text: str) -> Formula:
    tokens = _tokenize(text)
    if not tokens:
        raise FormatError("empty formula")
    node, pos = _read_sexp(tokens, 0)
    if pos != len(tokens):
        raise FormatError("trailing tokens after formula")
    return _to_formula(node)


def format_formula(phi: Formula) -> str:
    if phi == TOP:
        return "true"
    if phi == BOTTOM:
        return "false"
    if isinstance(phi, Rel):
        return "(rel " + phi.name + " " + " ".join(f"x{v}" for v in phi.args) + ")"
    if isinstance(phi, Eq):
        return f"(eq x{phi.left} x{phi.right})"
    if isinstance(phi, ColorEq):
        return f"(color {phi.color} " + " ".join(f"x{v}" for v in phi.args) + ")"
    if isinstance(phi, Not):
        return f"(not {format_formula(phi.body)})"
    if isinstance(phi, And):
        return "(and " + " ".join(format_formula(p) for p in phi.parts) + ")"
    if isinstance(phi, Or):
        return "(or " + " ".join(format_formula(p) for p in phi.parts) + ")"
    if isinstance(phi, Exists):
        vars_ = " ".join(f"x{v}" for v in phi.variables)
        return f"(exists ({vars_}) {format_formula(phi.body)})"
    raise FormatError(f"{phi!r} has no text form")


# ---------------------------------------------------------------------------
# Run reports


@dataclass
class RunReport:
    subcommand: str
    arguments: dict
    inputs: dict  # path -> sha256 hex digest
    result: dict
    version: str = __version__
    elapsed_s: float = 0.0

    def to_json(self) -> str:
        payload = {
            "subcommand": self.subcommand,
            "arguments": self.arguments,
            "inputs": self.inputs,
            "result": self.result,
            "version": self.version,
            "elapsed_s": self.elapsed_s,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        data = json.loads(text)
        return cls(
            subcommand=data["subcommand"],
            arguments=data["arguments"],
            inputs=data["inputs"],
            result=data["result"],
            version=data["version"],
            elapsed_s=data["elapsed_s"],
        )


def digest_file(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()
