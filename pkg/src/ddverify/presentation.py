"""Quantum GL2 relations as data, evaluated on concrete 4x4 assignments."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

from . import expr as ex
from .matd import Mat
from .scalar import Scalar

GENERATORS = ("c11", "c12", "c21", "c22")
DEFAULT_RELATIONS = "dipper-donkin-gl2"

Word = Tuple[str, ...]
Assignment = Mapping[str, Mat]


class RelationFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Relation:
    name: str
    terms: Tuple[Tuple[ex.Expr, Word], ...]

    def to_text(self) -> str:
        parts = []
        for coeff, word in self.terms:
            w = "*".join(word)
            if coeff == ex.Num(1):
                parts.append(w)
            elif isinstance(coeff, ex.Neg) and coeff.operand == ex.Num(1):
                parts.append("-" + w)
            else:
                c = ex.to_text(coeff)
                if isinstance(coeff, ex.BinOp):
                    c = f"({c})"
                parts.append(f"{c}*{w}")
        body = parts[0] if parts else "0"
        for p in parts[1:]:
            body += (" - " + p[1:]) if p.startswith("-") else (" + " + p)
        return f"{self.name}: {body}"


def _expand(node: ex.Expr, line: str) -> List[Tuple[ex.Expr, Word]]:
    """Expand into a noncommutative polynomial in the generators."""
    if isinstance(node, ex.Param):
        if node.name in GENERATORS:
            return [(ex.Num(1), (node.name,))]
        raise RelationFormatError(f"relation coefficients may only use q: {node.name!r} in {line!r}")
    if isinstance(node, (ex.Num, ex.QSym)):
        return [(node, ())]
    if isinstance(node, ex.Imag):
        raise RelationFormatError(f"imaginary unit not allowed in relations: {line!r}")
    if isinstance(node, ex.Neg):
        return [(ex.Neg(c), w) for c, w in _expand(node.operand, line)]
    if isinstance(node, ex.Pow):
        inner = _expand(node.base, line)
        if any(w for _, w in inner):
            raise RelationFormatError(f"powers of generators are not supported: {line!r}")
        return [(node, ())]
    if isinstance(node, ex.BinOp):
        if node.op in "+-":
            right = _expand(node.right, line)
            if node.op == "-":
                right = [(ex.Neg(c), w) for c, w in right]
            return _expand(node.left, line) + right
        if node.op == "/":
            right = _expand(node.right, line)
            if any(w for _, w in right):
                raise RelationFormatError(f"division by a generator: {line!r}")
            return [(ex.BinOp("/", c, node.right), w) for c, w in _expand(node.left, line)]
        out = []
        for cl, wl in _expand(node.left, line):
            for cr, wr in _expand(node.right, line):
                out.append((ex._mul(cl, cr), wl + wr))
        return out
    raise RelationFormatError(f"unsupported construct in {line!r}")


def parse_relation(line: str) -> Relation:
    name, sep, body = line.partition(":")
    if not sep or not name.strip():
        raise RelationFormatError(f"expected 'NAME: polynomial', got {line!r}")
    terms = _expand(ex.parse(body), line)
    for _, word in terms:
        if not word:
            raise RelationFormatError(f"constant term in relation {name.strip()!r}")
    return Relation(name.strip(), tuple(terms))


def parse_relations(text: str) -> List[Relation]:
    rels = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rels.append(parse_relation(line))
    names = [r.name for r in rels]
    if len(set(names)) != len(names):
        raise RelationFormatError("duplicate relation names")
    return rels


def load_relations(path: Optional[Union[str, Path]] = None) -> List[Relation]:
    if path is None:
        text = resources.files("ddverify").joinpath("data/relations/" + DEFAULT_RELATIONS).read_text()
    else:
        text = Path(path).read_text()
    return parse_relations(text)


def _word_product(word: Word, asg: Assignment) -> Mat:
    m = asg[word[0]]
    for g in word[1:]:
        m = m @ asg[g]
    return m


def eval_relation(rel: Relation, asg: Assignment, env: Optional[Mapping[str, Scalar]] = None) -> Mat:
    """Residual matrix of ``rel``; the relation holds iff it is zero."""
    missing = [g for g in GENERATORS if g not in asg]
    if missing:
        raise KeyError(f"assignment is missing generators {missing}")
    env = env or {}
    n = asg["c11"].n
    total = Mat.zero(n)
    cache: Dict[Word, Mat] = {}
    for coeff, word in rel.terms:
        c = ex.evaluate(coeff, env)
        if c.is_zero():
            continue
        if word not in cache:
            cache[word] = _word_product(word, asg)
        total = total + cache[word].scale(c)
    return total


def check_all(asg: Assignment, env: Optional[Mapping[str, Scalar]] = None,
              relations: Optional[List[Relation]] = None) -> List[Tuple[str, Mat, bool]]:
    rels = load_relations() if relations is None else relations
    out = []
    for rel in rels:
        res = eval_relation(rel, asg, env)
        out.append((rel.name, res, res.is_zero()))
    return out


def _invert_q(node: ex.Expr) -> ex.Expr:
    if isinstance(node, ex.QSym):
        return ex.Pow(ex.QSym(), -1)
    if isinstance(node, ex.Neg):
        return ex.Neg(_invert_q(node.operand))
    if isinstance(node, ex.Pow):
        return ex.Pow(_invert_q(node.base), node.exponent)
    if isinstance(node, ex.BinOp):
        return ex.BinOp(node.op, _invert_q(node.left), _invert_q(node.right))
    return node


def flip_convention(rels: List[Relation]) -> List[Relation]:
    """The same presentation with q replaced by 1/q."""
    return [Relation(r.name, tuple((_invert_q(c), w) for c, w in r.terms)) for r in rels]
