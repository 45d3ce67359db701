"""Relational query language: parsing, context resolution, evaluation."""

from .evaluator import Evaluator, eval_context, evaluate
from .model import (
    And, Binding, Closure, ContextExpr, CtxAtom, CtxEnum, CtxHierarchy,
    CtxImplementors, CtxPackage, CtxProject, CtxTypeMembers, CtxUnion,
    EntityTerm, MatchSet, NamePattern, Or, Primitive, Query, QueryExpr,
    RelTuple, ResultSet, SourceOf, TargetOf, VarRef, VarTerm, VirtualTerm,
    merge_tuples,
)
from .parser import context_to_expr, parse_context, parse_expr, parse_query

__all__ = [
    "And", "Binding", "Closure", "ContextExpr", "CtxAtom", "CtxEnum",
    "CtxHierarchy", "CtxImplementors", "CtxPackage", "CtxProject",
    "CtxTypeMembers", "CtxUnion", "EntityTerm", "Evaluator", "MatchSet",
    "NamePattern", "Or", "Primitive", "Query", "QueryExpr", "RelTuple",
    "ResultSet", "SourceOf", "TargetOf", "VarRef", "VarTerm", "VirtualTerm",
    "context_to_expr", "eval_context", "evaluate", "merge_tuples",
    "parse_context", "parse_expr", "parse_query",
]
