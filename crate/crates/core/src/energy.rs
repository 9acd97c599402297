//! Energy accounting: per-operation cost table, per-node ledger and the
//! per-handshake composition of each key-management scheme.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::AddAssign;
use core::str::FromStr;

use crate::UnknownName;

/// Ledger itemization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Tx,
    Rx,
    Hash,
    Mac,
    Cipher,
    Dh,
    /// Certificate verification and Bloom filter checks of the reference schemes.
    Other,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::Tx,
        Category::Rx,
        Category::Hash,
        Category::Mac,
        Category::Cipher,
        Category::Dh,
        Category::Other,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Tx => "tx",
            Category::Rx => "rx",
            Category::Hash => "hash",
            Category::Mac => "mac",
            Category::Cipher => "cipher",
            Category::Dh => "dh",
            Category::Other => "other",
        })
    }
}

/// Millijoule costs. Radio costs are per octet, the rest per invocation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CostTable {
    pub tx_per_octet: f64,
    pub rx_per_octet: f64,
    pub sha1: f64,
    pub aes: f64,
    pub hmac: f64,
    pub ecdh: f64,
    pub cert_verify: f64,
    pub bloom: f64,
}

impl CostTable {
    pub fn validate(&self) -> Result<(), EnergyError> {
        let all = [
            self.tx_per_octet,
            self.rx_per_octet,
            self.sha1,
            self.aes,
            self.hmac,
            self.ecdh,
            self.cert_verify,
            self.bloom,
        ];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(EnergyError::InvalidCostTable);
        }
        Ok(())
    }

    /// Cost of a batch of operations, radio excluded.
    pub fn ops_cost(&self, ops: &OpCounts) -> f64 {
        ops.sha1 as f64 * self.sha1
            + ops.aes as f64 * self.aes
            + ops.hmac as f64 * self.hmac
            + ops.dh as f64 * self.ecdh
            + ops.cert as f64 * self.cert_verify
            + ops.bloom as f64 * self.bloom
    }
}

/// Counts of cryptographic operations performed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpCounts {
    pub sha1: u64,
    pub aes: u64,
    pub hmac: u64,
    /// One Diffie-Hellman agreement, key derivation included.
    pub dh: u64,
    pub cert: u64,
    pub bloom: u64,
}

impl OpCounts {
    pub fn is_zero(&self) -> bool {
        *self == OpCounts::default()
    }
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, o: Self) {
        self.sha1 += o.sha1;
        self.aes += o.aes;
        self.hmac += o.hmac;
        self.dh += o.dh;
        self.cert += o.cert;
        self.bloom += o.bloom;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnergyError {
    NegativeAmount(f64),
    UnknownNode(usize),
    InvalidCostTable,
}

impl fmt::Display for EnergyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnergyError::NegativeAmount(a) => write!(f, "cannot charge a negative amount ({a} mJ)"),
            EnergyError::UnknownNode(n) => write!(f, "no ledger entry for node index {n}"),
            EnergyError::InvalidCostTable => f.write_str("cost table entries must be finite and non-negative"),
        }
    }
}

impl core::error::Error for EnergyError {}

const CATEGORIES: usize = Category::ALL.len();

/// Per-node energy accumulators, itemized by [`Category`].
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    rows: Vec<[f64; CATEGORIES]>,
}

impl EnergyLedger {
    pub fn new(nodes: usize) -> Self {
        EnergyLedger { rows: vec![[0.0; CATEGORIES]; nodes] }
    }

    pub fn nodes(&self) -> usize {
        self.rows.len()
    }

    pub fn charge(&mut self, node: usize, category: Category, mj: f64) -> Result<(), EnergyError> {
        if mj.is_nan() || mj < 0.0 {
            return Err(EnergyError::NegativeAmount(mj));
        }
        let row = self.rows.get_mut(node).ok_or(EnergyError::UnknownNode(node))?;
        row[category.index()] += mj;
        Ok(())
    }

    /// Charges every operation in `ops` at the rates of `table`.
    pub fn charge_ops(&mut self, node: usize, ops: &OpCounts, table: &CostTable) -> Result<(), EnergyError> {
        let items = [
            (Category::Hash, ops.sha1 as f64 * table.sha1),
            (Category::Cipher, ops.aes as f64 * table.aes),
            (Category::Mac, ops.hmac as f64 * table.hmac),
            (Category::Dh, ops.dh as f64 * table.ecdh),
            (Category::Other, ops.cert as f64 * table.cert_verify + ops.bloom as f64 * table.bloom),
        ];
        for (cat, mj) in items {
            self.charge(node, cat, mj)?;
        }
        Ok(())
    }

    pub fn get(&self, node: usize, category: Category) -> f64 {
        self.rows.get(node).map_or(0.0, |r| r[category.index()])
    }

    pub fn node_total(&self, node: usize) -> f64 {
        self.rows.get(node).map_or(0.0, |r| r.iter().sum())
    }

    pub fn category_total(&self, category: Category) -> f64 {
        self.rows.iter().map(|r| r[category.index()]).sum()
    }

    pub fn total(&self) -> f64 {
        (0..self.rows.len()).map(|n| self.node_total(n)).sum()
    }
}

/// Key-management schemes compared by energy and memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Scheme {
    Certificate,
    Hybrid,
    Ba,
    Iba,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Certificate, Scheme::Hybrid, Scheme::Ba, Scheme::Iba];
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Certificate => "certificate",
            Scheme::Hybrid => "hybrid",
            Scheme::Ba => "BA",
            Scheme::Iba => "iBA",
        })
    }
}

impl FromStr for Scheme {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "certificate" | "cert" => Ok(Scheme::Certificate),
            "hybrid" => Ok(Scheme::Hybrid),
            "ba" | "basic" => Ok(Scheme::Ba),
            "iba" | "i-ba" => Ok(Scheme::Iba),
            _ => Err(UnknownName),
        }
    }
}

/// What one node spends to establish a key with one neighbour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeCost {
    pub scheme: Scheme,
    pub ops: OpCounts,
    pub tx_octets: u64,
    pub rx_octets: u64,
}

/// Per-handshake composition of each scheme over ECC-160.
///
/// Octet counts are on-air sizes (headers included) of the messages one node
/// sends and receives: its ticket and ack out; the base-station broadcast,
/// the disclosure, the peer's ticket and the peer's ack in. The certificate
/// scheme exchanges `id | public | ECDSA signature` (65 octets) and the
/// hybrid scheme `id | public` (23 octets), each followed by an ack.
pub fn scheme_cost(scheme: Scheme) -> SchemeCost {
    use crate::codec::{on_air_len, ticket_len, ACK_LEN, BA_MESSAGE_LEN, DISCLOSURE_LEN, IBA_MESSAGE_LEN};
    const ECC_PUBLIC: usize = 21;
    let ticket = on_air_len(ticket_len(ECC_PUBLIC)) as u64;
    let ack = on_air_len(ACK_LEN) as u64;
    let disclosure = on_air_len(DISCLOSURE_LEN) as u64;
    let (ops, tx, rx) = match scheme {
        Scheme::Certificate => {
            let msg = on_air_len(2 + ECC_PUBLIC + 2 * ECC_PUBLIC) as u64 + ack;
            (OpCounts { cert: 1, dh: 1, ..Default::default() }, msg, msg)
        }
        Scheme::Hybrid => {
            let msg = on_air_len(2 + ECC_PUBLIC) as u64 + ack;
            (OpCounts { bloom: 1, sha1: 2, dh: 1, ..Default::default() }, msg, msg)
        }
        Scheme::Ba => (
            OpCounts { sha1: 1, aes: 1, hmac: 1, dh: 1, ..Default::default() },
            ticket + ack,
            on_air_len(BA_MESSAGE_LEN) as u64 + disclosure + ticket + ack,
        ),
        Scheme::Iba => (
            OpCounts { sha1: 2, aes: 2, hmac: 1, dh: 1, ..Default::default() },
            ticket + ack,
            on_air_len(IBA_MESSAGE_LEN) as u64 + disclosure + ticket + ack,
        ),
    };
    SchemeCost { scheme, ops, tx_octets: tx, rx_octets: rx }
}

/// Radio plus computation energy of one handshake, in mJ.
pub fn scheme_energy(table: &CostTable, scheme: Scheme) -> f64 {
    let c = scheme_cost(scheme);
    c.tx_octets as f64 * table.tx_per_octet + c.rx_octets as f64 * table.rx_per_octet + table.ops_cost(&c.ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn ledger_conservation() {
        let mut l = EnergyLedger::new(3);
        l.charge(0, Category::Tx, 1.5).unwrap();
        l.charge(0, Category::Rx, 0.25).unwrap();
        l.charge(2, Category::Dh, 4.0).unwrap();
        let table = CostTable { sha1: 1.0, aes: 2.0, hmac: 3.0, ..Default::default() };
        l.charge_ops(1, &OpCounts { sha1: 1, aes: 1, hmac: 1, ..Default::default() }, &table).unwrap();
        assert_eq!(l.node_total(0), 1.75);
        assert_eq!(l.node_total(1), 6.0);
        let by_cat: f64 = Category::ALL.iter().map(|&c| l.category_total(c)).sum();
        assert_eq!(l.total(), by_cat);
        assert_eq!(l.total(), 11.75);
    }

    #[test]
    fn negative_and_unknown_charges_rejected() {
        let mut l = EnergyLedger::new(1);
        assert_eq!(l.charge(0, Category::Tx, -0.1), Err(EnergyError::NegativeAmount(-0.1)));
        assert!(l.charge(0, Category::Tx, f64::NAN).is_err());
        assert_eq!(l.charge(1, Category::Tx, 0.1), Err(EnergyError::UnknownNode(1)));
        assert_eq!(l.total(), 0.0);
    }

    #[test]
    fn iba_adds_one_hash_and_one_cipher() {
        let ba = scheme_cost(Scheme::Ba).ops;
        let iba = scheme_cost(Scheme::Iba).ops;
        assert_eq!(iba.sha1, ba.sha1 + 1);
        assert_eq!(iba.aes, ba.aes + 1);
        assert_eq!((iba.hmac, iba.dh), (ba.hmac, ba.dh));
    }

    #[test]
    fn handshake_octets() {
        let ba = scheme_cost(Scheme::Ba);
        assert_eq!((ba.tx_octets, ba.rx_octets), (90, 158));
        let iba = scheme_cost(Scheme::Iba);
        assert_eq!((iba.tx_octets, iba.rx_octets), (90, 210));
        assert_eq!(scheme_cost(Scheme::Certificate).tx_octets, 123);
        assert_eq!(scheme_cost(Scheme::Hybrid).rx_octets, 63);
    }

    #[test]
    fn zero_table_costs_nothing() {
        for s in Scheme::ALL {
            assert_eq!(scheme_energy(&CostTable::default(), s), 0.0);
        }
    }

    #[test]
    fn scheme_names_parse() {
        for s in Scheme::ALL {
            assert_eq!(s.to_string().parse::<Scheme>(), Ok(s));
        }
        assert!("rsa".parse::<Scheme>().is_err());
    }
}
