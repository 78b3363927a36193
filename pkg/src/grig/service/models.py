"""Pydantic request/response models for the service endpoints.

Words travel as strings in the CLI syntax (letters a-d, parenthesized
powers, "1" or "" for the identity); they are parsed and validated inside
the endpoints so that syntax errors surface as input errors, not schema
errors.
"""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field


class WordRequest(BaseModel):
    word: str


class WordResponse(BaseModel):
    word: str


class PairRequest(BaseModel):
    g: str
    h: str


class SectionRequest(BaseModel):
    word: str
    vertex: str


class ActResponse(BaseModel):
    vertex: str


class OrderResponse(BaseModel):
    order: int


class BoolResponse(BaseModel):
    value: bool


class LengthResponse(BaseModel):
    length: int


class StabRequest(BaseModel):
    word: str
    level: int = Field(ge=0)


class CosetResponse(BaseModel):
    coset: str
    index: int


class KmCosetRequest(BaseModel):
    word: str
    level: int = Field(ge=0)


class DescriptorModel(BaseModel):
    level: int
    z: Optional[int] = None
    twist: Optional[bool] = None
    children: Optional[list["DescriptorModel"]] = None


class KmCosetResponse(BaseModel):
    descriptor: DescriptorModel


class ConjugacyRequest(BaseModel):
    g: str
    h: str


class ConjugacyResponse(BaseModel):
    conjugate: bool
    level: int
    witness_cosets: list[Any]
    depth_used: int


class SubgroupConjugacyRequest(BaseModel):
    g: str
    h: str
    generators: list[str]
    km_level: int = Field(ge=0)


class QFinRequest(BaseModel):
    g: str
    h: str
    depth: int = Field(ge=3)


class QFinResponse(BaseModel):
    depth: int
    cosets: list[str]


class StabilizeRequest(BaseModel):
    g: str
    h: str
    max_depth: int = Field(ge=4)


class StabilizeResponse(BaseModel):
    depth: int
    bound: int
    within_bound: bool
    max_depth: int


class SplittingTreeRequest(BaseModel):
    g: str
    h: str
    depth: int = Field(ge=3)
    dot: bool = False


class TreeNodeModel(BaseModel):
    depth_label: int
    g: str
    h: str
    case: str
    children: list["TreeNodeModel"] = []


class SplittingTreeResponse(BaseModel):
    tree: TreeNodeModel
    depth: int
    dot: Optional[str] = None


class QuotientEnumerateRequest(BaseModel):
    depth: int = Field(ge=1)


class QuotientEnumerateResponse(BaseModel):
    depth: int
    order: int


class VerifyRequest(BaseModel):
    workers: int = Field(default=1, ge=1)
    groups: Optional[list[list[str]]] = None


class VerifyResponse(BaseModel):
    name: str
    passed: bool
    seconds: float
    details: dict


class VerifyAllResponse(BaseModel):
    passed: bool
    reports: list[VerifyResponse]


class SchreierDotResponse(BaseModel):
    dot: str


DescriptorModel.model_rebuild()
TreeNodeModel.model_rebuild()
