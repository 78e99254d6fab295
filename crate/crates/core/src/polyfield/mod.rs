//! Monic polynomials over a prime field `F_q`: arithmetic, irreducible
//! tables, factorization and the exact divisor-degree law of `M_q(n)`.

mod irreducible;
mod lhs;
mod poly;

pub use irreducible::{
    irr_cache_path, load_or_build_irr, necklace_count, read_irr, write_irr, IrreducibleTable,
    IRR_MAGIC, MAX_TABLE_Q, MAX_TABLE_SIZE,
};
pub use lhs::{deviation_poly, exact_lhs_poly, PolyDegreeCounts, MAX_POLY_ENUMERATION};
pub use poly::{poly_divrem, poly_mul, tau_k_poly, FactoredPoly, PolyQ};

/// Factors a monic polynomial with `table`.
pub fn factor_poly(f: &PolyQ, table: &IrreducibleTable) -> crate::Result<FactoredPoly> {
    table.factor(f)
}
