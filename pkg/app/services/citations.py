"""Anchors for registered checks.

Every check names a citation by reference. A citation is the topic heading the
statement belongs to and the statement itself, quoted as a formula wherever
one exists.
"""
from dataclasses import dataclass
from typing import Dict

from app.core.errors import MalformedInputError

SECTIONS = (
    "exterior algebra",
    "G2 structures",
    "curvature spaces",
    "naturally reductive spaces",
    "transvection algebras",
    "Gray manifolds",
    "nearly parallel G2 manifolds",
    "3-(α,δ)-Sasaki manifolds",
    "Sasaki manifolds",
    "dimension three",
    "canonical splittings",
    "Riemannian curvature",
)


@dataclass(frozen=True)
class Citation:
    ref: str
    section: str
    quote: str

    def __str__(self) -> str:
        return f"{self.section}: \"{self.quote}\""


_ENTRIES = {
    "exterior algebra": {
        "leibniz": "A_*(α∧β) = A_*α∧β + α∧A_*β",
        "commutator": "[A_*, B_*] = [A, B]_*",
        "two-form-dictionary": "g(A X, Y) = α(X, Y) identifies 2-forms with skew endomorphisms",
    },
    "G2 structures": {
        "g2-stabilizer": "the stabilizer of φ is the 14-dimensional compact Lie algebra g2",
        "g2-bracket": "2φ_{φ_X Y} + [φ_X, φ_Y] = 3 X∧Y",
        "g2-anticommutator": "φ_X φ_Y + φ_Y φ_X = −2⟨X, Y⟩ Id + X⊙Y",
    },
    "curvature spaces": {
        "casimir": "the Casimir operator of so(n) acts on R^n as (n − 1) Id",
        "curvature-space-so3": "K(so(3)) ≅ Sym²R³",
        "curvature-space-su3": "K(h) ≅ R for h = su(3) acting on V ≅ h",
        "curvature-space-irreducible-so3": "K(so(3)) = 0 for so(3) acting irreducibly on R^7",
    },
    "naturally reductive spaces": {
        "kxk-torsion": "T(X, Y) = −2t [X, Y] on m_t",
        "kxk-curvature": "R(X, Y) = −(1 − t²) ad([X, Y])",
        "kxk-holonomy": "hol(∇^t) = su(2) for t ≠ ±1, and ∇^{±1} is flat",
        "kxk-kappa": "R^τ = κ τ² with κ = (1 − t²)/t², scal_g = 2(1 + κ)‖τ‖²",
        "symmetric-pair": "[m, m] ⊆ h for the member t = 0",
        "symmetric-levi-civita": "on a symmetric space the canonical connection is the Levi-Civita connection",
        "canonical-holonomy": "hol(∇^can) = ρ([m, m]_h)",
        "berger-stabilizer": "SO(5)/SO(3)_irr carries an invariant 3-form with stabilizer g2",
        "berger-irreducible": "so(3) acts irreducibly on m ≅ R^7",
    },
    "transvection algebras": {
        "transvection-compact": "if Ric^g(X, X) + |τ_X|² > 0 then g = hol ⊕ m is compact and semisimple",
    },
    "Gray manifolds": {
        "su3-stabilizer": "stab(Re(dz1∧dz2∧dz3)) = su(3)",
        "gray-stabilizer": "stab(τ) = su(3) for the torsion of a Gray manifold",
        "gray-holomorphic": "τ_X∘J + J∘τ_X = 0",
        "gray-x-jx": "τ_X JX = 0 for every tangent vector X",
        "gray-holonomy": "hol(∇^τ) is su(3) on S⁶, t² on F₁,₂, u(2) on CP³ and su(2) on S³×S³",
        "gray-norm": "|τ_X Y|² = ¼ for unit X ⊥ Y, JY at scal_g = 30",
        "gray-twistor": "−tr((4Jτ_V)²) = 16|V|² for vertical V at scal_g = 30",
        "gray-not-proportional": "R^τ takes values in a 3-dimensional holonomy while τ² has rank 6",
    },
    "nearly parallel G2 manifolds": {
        "ng2-torsion": "τ = αφ at δ = 5α",
        "ng2-stabilizer": "stab(τ) = g2 for a nearly parallel G2 structure",
        "ng2-vertical-constant": "R^τ(U, V)W = −24 τ_{τ_U V}W",
        "ng2-ricci-torsion": "Ric^τ = 48(τ₀/12)² Id",
        "ng2-ricci-levi-civita": "Ric^g = (3τ₀²/8) Id",
        "ng2-holonomy": "hol(∇^τ) = sp(1) ⊕ sp(1)",
        "ng2-holonomy-block": "hol(∇^τ) lies in the so(4) of g2 preserving V",
        "ng2-auxiliary-flat": "the connection ∇^τ − 6τ^V on V is flat",
        "ng2-auxiliary-volume": "∇φ^V = 0 for ∇ = ∇^τ − 6τ^V",
        "ng2-horizontal-vertical": "R^τ(X, Y)V = 12 τ_{τ_X Y}V",
    },
    "3-(α,δ)-Sasaki manifolds": {
        "threead-square": "Φ_i² = −Id + ξ_i ⊗ ξ_i",
        "threead-cross": "Φ_k X = −Φ_i Φ_j X + ⟨ξ_j, X⟩ ξ_i",
        "threead-horizontal": "Φ_i^H Φ_j^H = −Φ_k^H = −Φ_j^H Φ_i^H",
        "threead-g2-form": "Σ ξ_i∧Φ_i^H + ξ_123 is a G2 form for n = 1",
        "threead-stabilizer-g2": "stab(τ^γ) = g2 for n = 1 and δ = 5α",
        "threead-stabilizer": "stab(τ^γ) = sp(n) ⊕ sp(1)",
        "threead-contact": "dξ_i = 2αΦ_i + 2(α − δ) ξ_j∧ξ_k",
        "threead-parallel-torsion": "∇^τ τ^γ = 0 exactly for γ = 2(δ − 4α)",
        "threead-invariant-tensors": "ξ_i, Φ_i and τ are invariant under the isotropy",
        "threead-parallel-frame": "Λ^τ = 0 for δ = 2α, so every ξ_i and Φ_i is parallel",
    },
    "Sasaki manifolds": {
        "sasaki-stabilizer": "stab(ξ∧Φ) = u(n)",
        "sasaki-torsion": "τ = ξ∧Φ is the characteristic torsion",
        "sasaki-d-xi": "dξ = 2Φ",
        "sasaki-nabla-phi": "∇^g_X Φ = −X∧ξ",
        "sasaki-parallel-reeb": "∇^τ ξ = 0",
        "sasaki-reeb-derivative": "dξ = 2 ξ⌟τ",
        "stiefel-holonomy": "hol(∇^τ) = so(n) on SO(n+2)/SO(n)",
        "stiefel-curvature": "R^τ(X, Y)Z = R^N(X, Y)Z + 4ω(X, Y)JZ",
        "stiefel-holonomy-inclusion": "Hol(∇^τ) ⊆ Hol(∇^{g_N})·U(1)",
        "stiefel-invariant-tensors": "ξ, Φ and ω are invariant under the isotropy",
        "berger-sphere-holonomy": "hol(∇^τ) = so(2) on the Berger sphere",
    },
    "dimension three": {
        "dim3-relation": "R^g(X, Y) = R^τ(X, Y) − t² X∧Y",
        "dim3-flat": "∇^τ flat forces constant sectional curvature t²",
        "dim3-parallel": "∇^τ τ = 0 for τ = t vol",
    },
    "canonical splittings": {
        "admissible": "any canonical g-splitting is an admissible splitting",
        "s3-refinement": "τ^H ∈ ⊕ Λ³H_a and τ^m ∈ ⊕ Λ²H_a ⊗ V",
        "s4": "(τ_V)_* τ^H = 0",
        "mixed-curvature": "R^τ(X, V) = 0",
        "horizontal-vertical": "R^τ(X, Y)V = −4[τ_X, τ_Y]V + 4τ_{τ_X Y}V",
        "vertical-equivariance": "pr_{Λ²V}∘R^τ is g-invariant",
        "special-type": "the horizontal part τ^H vanishes when g acts trivially on V ≠ 0",
        "decomposable": "stab(τ₁ + τ₂) = stab(τ₁) ⊕ stab(τ₂) on T₁ ⊕ T₂",
        "indecomposable": "no orthogonal invariant T₁ ⊕ T₂ carries τ as τ₁ + τ₂",
    },
    "Riemannian curvature": {
        "bianchi": "b(R^g) = 0",
        "bracket-form": "R^g = R^τ + [τ_X, τ_Y] − 2τ_{τ_X Y}",
        "levi-civita": "R^g = R^τ + τ² + b(τ²)",
    },
}

CITATIONS: Dict[str, Citation] = {
    ref: Citation(ref, section, quote)
    for section, entries in _ENTRIES.items()
    for ref, quote in entries.items()
}


def cite(ref: str) -> Citation:
    try:
        return CITATIONS[ref]
    except KeyError:
        raise MalformedInputError(f"unknown citation {ref!r}") from None
