//! Explicit constructions with self-checking certificates: unitary
//! transporters, walks inside a determinant class, and small auxiliary
//! identities and graphs.

mod identities;
mod transport;
mod walk;

pub use identities::{
    clique_column_graph, isotropic_quadruple_solve, quadruple_holds, verify_absorption_identities,
    AbsorptionIdentityReport, CliqueColumnGraph,
};
pub use transport::{
    is_orthonormal, is_unitary, orthonormal_complete, random_isotropic, random_isotropic_pair,
    transport_cliques, transport_isotropic, transport_pair_nonorthogonal, transport_pair_orthogonal,
};
pub use walk::{equal_det_walk, HopKind, WalkCertificate};

use serde::{Deserialize, Serialize};

use serde_json::{json, Value};

use crate::gf::{Fe, Field};
use crate::hermat::Matrix;

/// One evaluated equality of a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
}

impl Check {
    pub fn new(name: &str, holds: bool) -> Check {
        Check { name: name.to_string(), holds }
    }
}

/// A matrix `P` together with the scale `b` of a transported vector and
/// the equalities that were rechecked after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct TransportCertificate {
    pub p: Matrix,
    pub scale: Fe,
    pub checks: Vec<Check>,
}

impl TransportCertificate {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn to_json(&self, f: &Field) -> Value {
        json!({
            "q": f.q(),
            "modulus": f.spec().modulus_string(),
            "p": matrix_indices(&self.p),
            "scale": self.scale.index(),
            "checks": self.checks,
            "holds": self.holds(),
        })
    }
}

/// Matrix entries as element indices, row by row.
pub fn matrix_indices(m: &Matrix) -> Vec<Vec<u32>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|v| v.index()).collect()).collect()
}
