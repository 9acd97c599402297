use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand_core::RngCore;

use super::CryptoError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Backend {
    /// Multiplicative group of a prime field with modulus below 2^64.
    ToyGroup,
    /// secp160r1.
    Ecc160,
}

/// Domain parameters shared by every node of a deployment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupParams {
    Toy { modulus: u64, generator: u64 },
    Ecc160,
}

/// Big-endian private scalar.
#[derive(Clone, PartialEq, Eq)]
pub struct PrivateScalar(pub Vec<u8>);

impl core::fmt::Debug for PrivateScalar {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("PrivateScalar(..)")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DhKeyPair {
    pub public: Vec<u8>,
    pub private: PrivateScalar,
}

/// 2^61 - 1 with primitive root 37.
const DEFAULT_TOY_MODULUS: u64 = (1 << 61) - 1;
const DEFAULT_TOY_GENERATOR: u64 = 37;

impl GroupParams {
    pub fn toy(modulus: u64, generator: u64) -> Result<Self, CryptoError> {
        if modulus < 5 || !is_prime_u64(modulus) || generator <= 1 || generator >= modulus {
            return Err(CryptoError::InvalidGroup);
        }
        Ok(GroupParams::Toy { modulus, generator })
    }

    pub fn default_toy() -> Self {
        GroupParams::Toy { modulus: DEFAULT_TOY_MODULUS, generator: DEFAULT_TOY_GENERATOR }
    }

    pub fn ecc160() -> Self {
        GroupParams::Ecc160
    }

    pub fn for_backend(backend: Backend) -> Self {
        match backend {
            Backend::ToyGroup => Self::default_toy(),
            Backend::Ecc160 => Self::ecc160(),
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            GroupParams::Toy { .. } => Backend::ToyGroup,
            GroupParams::Ecc160 => Backend::Ecc160,
        }
    }

    /// Order of the group the private scalars live in.
    pub fn order(&self) -> BigUint {
        match self {
            GroupParams::Toy { modulus, .. } => BigUint::from(modulus - 1),
            GroupParams::Ecc160 => curve().n.clone(),
        }
    }

    pub fn generator_encoding(&self) -> Vec<u8> {
        match self {
            GroupParams::Toy { generator, .. } => generator.to_be_bytes().to_vec(),
            GroupParams::Ecc160 => {
                let c = curve();
                encode_point(&Affine { x: c.gx.clone(), y: c.gy.clone() })
            }
        }
    }

    /// Encoded length of a public element.
    pub fn public_len(&self) -> usize {
        match self {
            GroupParams::Toy { .. } => 8,
            GroupParams::Ecc160 => ECC_PUBLIC_LEN,
        }
    }

    /// Encoded length of a shared secret.
    pub fn shared_len(&self) -> usize {
        match self {
            GroupParams::Toy { .. } => 8,
            GroupParams::Ecc160 => FIELD_LEN,
        }
    }

    pub fn keygen<R: RngCore + ?Sized>(&self, rng: &mut R) -> DhKeyPair {
        let order = self.order();
        let mut buf = vec![0u8; (order.bits() as usize).div_ceil(8) + 8];
        rng.fill_bytes(&mut buf);
        // Uniform enough: 64 surplus bits before reduction into [1, order-1].
        let k = BigUint::from_bytes_be(&buf) % (&order - 1u32) + 1u32;
        self.keypair_from_private(&PrivateScalar(k.to_bytes_be()))
            .expect("scalar reduced into range")
    }

    pub fn keypair_from_private(&self, private: &PrivateScalar) -> Result<DhKeyPair, CryptoError> {
        let k = self.check_scalar(private)?;
        let public = match self {
            GroupParams::Toy { modulus, generator } => {
                let k = u64::try_from(&k).map_err(|_| CryptoError::InvalidScalar)?;
                pow_mod(*generator, k, *modulus).to_be_bytes().to_vec()
            }
            GroupParams::Ecc160 => {
                let c = curve();
                let g = Affine { x: c.gx.clone(), y: c.gy.clone() };
                let p = scalar_mul(&k, &g).ok_or(CryptoError::InvalidScalar)?;
                encode_point(&p)
            }
        };
        Ok(DhKeyPair { public, private: private.clone() })
    }

    /// Raises/multiplies the peer element by our private scalar and returns
    /// the canonical encoding (toy: 8-octet residue, curve: x coordinate).
    pub fn shared(&self, private: &PrivateScalar, peer_public: &[u8]) -> Result<Vec<u8>, CryptoError> {
        let k = self.check_scalar(private)?;
        match self {
            GroupParams::Toy { modulus, .. } => {
                let y = decode_toy(peer_public, *modulus)?;
                let k = u64::try_from(&k).map_err(|_| CryptoError::InvalidScalar)?;
                Ok(pow_mod(y, k, *modulus).to_be_bytes().to_vec())
            }
            GroupParams::Ecc160 => {
                let peer = decode_point(peer_public)?;
                let s = scalar_mul(&k, &peer).ok_or(CryptoError::InvalidPoint)?;
                Ok(to_fixed(&s.x))
            }
        }
    }

    /// Whether `public` decodes to a non-identity element of this group.
    pub fn is_valid_public(&self, public: &[u8]) -> bool {
        match self {
            GroupParams::Toy { modulus, .. } => decode_toy(public, *modulus).is_ok(),
            GroupParams::Ecc160 => decode_point(public).is_ok(),
        }
    }

    fn check_scalar(&self, private: &PrivateScalar) -> Result<BigUint, CryptoError> {
        let k = BigUint::from_bytes_be(&private.0);
        if k.is_zero() || k >= self.order() {
            return Err(CryptoError::InvalidScalar);
        }
        Ok(k)
    }
}

fn decode_toy(bytes: &[u8], modulus: u64) -> Result<u64, CryptoError> {
    let arr: [u8; 8] = bytes.try_into().map_err(|_| CryptoError::InvalidPoint)?;
    let y = u64::from_be_bytes(arr);
    // 0 is not in the group and 1 is the identity.
    if y <= 1 || y >= modulus {
        return Err(CryptoError::InvalidPoint);
    }
    Ok(y)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit inputs.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// secp160r1, y^2 = x^3 - 3x + b over p = 2^160 - 2^31 - 1, cofactor 1.

const FIELD_LEN: usize = 20;
const ECC_PUBLIC_LEN: usize = FIELD_LEN + 1;

struct Curve {
    p: BigUint,
    b: BigUint,
    n: BigUint,
    gx: BigUint,
    gy: BigUint,
    sqrt_exp: BigUint,
    inv_exp: BigUint,
}

fn hex(s: &str) -> BigUint {
    BigUint::parse_bytes(s.as_bytes(), 16).expect("valid hex constant")
}

fn curve() -> &'static Curve {
    // Lazily built and leaked; core has no OnceLock.
    use core::sync::atomic::{AtomicPtr, Ordering};
    static CELL: AtomicPtr<Curve> = AtomicPtr::new(core::ptr::null_mut());
    let ptr = CELL.load(Ordering::Acquire);
    if !ptr.is_null() {
        // SAFETY: the pointer was produced by Box::leak and is never freed.
        return unsafe { &*ptr };
    }
    let p = hex("ffffffffffffffffffffffffffffffff7fffffff");
    let c = Curve {
        b: hex("1c97befc54bd7a8b65acf89f81d4d4adc565fa45"),
        n: hex("0100000000000000000001f4c8f927aed3ca752257"),
        gx: hex("4a96b5688ef573284664698968c38bb913cbfc82"),
        gy: hex("23a628553168947d59dcc912042351377ac5fb32"),
        sqrt_exp: (&p + 1u32) >> 2,
        inv_exp: &p - 2u32,
        p,
    };
    let fresh = alloc::boxed::Box::into_raw(alloc::boxed::Box::new(c));
    match CELL.compare_exchange(core::ptr::null_mut(), fresh, Ordering::AcqRel, Ordering::Acquire) {
        Ok(_) => unsafe { &*fresh },
        Err(existing) => {
            // SAFETY: `fresh` was never shared; reclaim it.
            drop(unsafe { alloc::boxed::Box::from_raw(fresh) });
            unsafe { &*existing }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Affine {
    x: BigUint,
    y: BigUint,
}

#[derive(Clone)]
struct Jacobian {
    x: BigUint,
    y: BigUint,
    z: BigUint,
}

impl Jacobian {
    fn infinity() -> Self {
        Jacobian { x: BigUint::one(), y: BigUint::one(), z: BigUint::zero() }
    }

    fn is_infinity(&self) -> bool {
        self.z.is_zero()
    }
}

fn fmul(a: &BigUint, b: &BigUint, p: &BigUint) -> BigUint {
    (a * b) % p
}

fn fsub(a: &BigUint, b: &BigUint, p: &BigUint) -> BigUint {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

fn fadd(a: &BigUint, b: &BigUint, p: &BigUint) -> BigUint {
    let s = a + b;
    if &s >= p {
        s - p
    } else {
        s
    }
}

fn small(k: u32, a: &BigUint, p: &BigUint) -> BigUint {
    (a * k) % p
}

fn double(q: &Jacobian, p: &BigUint) -> Jacobian {
    if q.is_infinity() || q.y.is_zero() {
        return Jacobian::infinity();
    }
    // a = -3 doubling.
    let delta = fmul(&q.z, &q.z, p);
    let gamma = fmul(&q.y, &q.y, p);
    let beta = fmul(&q.x, &gamma, p);
    let alpha = small(3, &fmul(&fsub(&q.x, &delta, p), &fadd(&q.x, &delta, p), p), p);
    let x3 = fsub(&fmul(&alpha, &alpha, p), &small(8, &beta, p), p);
    let yz = fadd(&q.y, &q.z, p);
    let z3 = fsub(&fsub(&fmul(&yz, &yz, p), &gamma, p), &delta, p);
    let y3 = fsub(
        &fmul(&alpha, &fsub(&small(4, &beta, p), &x3, p), p),
        &small(8, &fmul(&gamma, &gamma, p), p),
        p,
    );
    Jacobian { x: x3, y: y3, z: z3 }
}

/// Adds an affine point to a Jacobian one.
fn add_mixed(q: &Jacobian, r: &Affine, p: &BigUint) -> Jacobian {
    if q.is_infinity() {
        return Jacobian { x: r.x.clone(), y: r.y.clone(), z: BigUint::one() };
    }
    let z1z1 = fmul(&q.z, &q.z, p);
    let u2 = fmul(&r.x, &z1z1, p);
    let s2 = fmul(&r.y, &fmul(&q.z, &z1z1, p), p);
    let h = fsub(&u2, &q.x, p);
    let rr = fsub(&s2, &q.y, p);
    if h.is_zero() {
        return if rr.is_zero() { double(q, p) } else { Jacobian::infinity() };
    }
    let hh = fmul(&h, &h, p);
    let hhh = fmul(&h, &hh, p);
    let v = fmul(&q.x, &hh, p);
    let x3 = fsub(&fsub(&fmul(&rr, &rr, p), &hhh, p), &small(2, &v, p), p);
    let y3 = fsub(&fmul(&rr, &fsub(&v, &x3, p), p), &fmul(&q.y, &hhh, p), p);
    let z3 = fmul(&q.z, &h, p);
    Jacobian { x: x3, y: y3, z: z3 }
}

fn to_affine(q: &Jacobian) -> Option<Affine> {
    if q.is_infinity() {
        return None;
    }
    let c = curve();
    let zinv = q.z.modpow(&c.inv_exp, &c.p);
    let zinv2 = fmul(&zinv, &zinv, &c.p);
    Some(Affine { x: fmul(&q.x, &zinv2, &c.p), y: fmul(&q.y, &fmul(&zinv2, &zinv, &c.p), &c.p) })
}

fn scalar_mul(k: &BigUint, point: &Affine) -> Option<Affine> {
    let p = &curve().p;
    let mut acc = Jacobian::infinity();
    for i in (0..k.bits()).rev() {
        acc = double(&acc, p);
        if k.bit(i) {
            acc = add_mixed(&acc, point, p);
        }
    }
    to_affine(&acc)
}

fn to_fixed(v: &BigUint) -> Vec<u8> {
    let raw = v.to_bytes_be();
    let mut out = vec![0u8; FIELD_LEN - raw.len()];
    out.extend_from_slice(&raw);
    out
}

fn encode_point(pt: &Affine) -> Vec<u8> {
    let mut out = Vec::with_capacity(ECC_PUBLIC_LEN);
    out.push(if pt.y.bit(0) { 0x03 } else { 0x02 });
    out.extend_from_slice(&to_fixed(&pt.x));
    out
}

fn decode_point(bytes: &[u8]) -> Result<Affine, CryptoError> {
    if bytes.len() != ECC_PUBLIC_LEN || !matches!(bytes[0], 0x02 | 0x03) {
        return Err(CryptoError::InvalidPoint);
    }
    let c = curve();
    let x = BigUint::from_bytes_be(&bytes[1..]);
    if x >= c.p {
        return Err(CryptoError::InvalidPoint);
    }
    let x3 = fmul(&fmul(&x, &x, &c.p), &x, &c.p);
    let rhs = fadd(&fsub(&x3, &small(3, &x, &c.p), &c.p), &c.b, &c.p);
    let mut y = rhs.modpow(&c.sqrt_exp, &c.p);
    if fmul(&y, &y, &c.p) != rhs {
        return Err(CryptoError::InvalidPoint);
    }
    if y.bit(0) != (bytes[0] == 0x03) {
        y = fsub(&BigUint::zero(), &y, &c.p);
    }
    Ok(Affine { x, y })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar(v: u64) -> PrivateScalar {
        PrivateScalar(BigUint::from(v).to_bytes_be())
    }

    #[test]
    fn toy_hand_example() {
        let g = GroupParams::toy(101, 2).unwrap();
        let kp = g.keypair_from_private(&scalar(5)).unwrap();
        assert_eq!(u64::from_be_bytes(kp.public.try_into().unwrap()), 32);
    }

    #[test]
    fn toy_rejects_bad_params() {
        assert_eq!(GroupParams::toy(100, 3), Err(CryptoError::InvalidGroup));
        assert_eq!(GroupParams::toy(101, 1), Err(CryptoError::InvalidGroup));
        assert_eq!(GroupParams::toy(101, 101), Err(CryptoError::InvalidGroup));
        assert!(GroupParams::toy((1 << 61) - 1, 37).is_ok());
    }

    #[test]
    fn toy_agreement_is_exhaustive_for_order_257() {
        let g = GroupParams::toy(257, 3).unwrap();
        let keys: Vec<_> = (1..256).map(|k| g.keypair_from_private(&scalar(k)).unwrap()).collect();
        for a in &keys {
            for b in &keys {
                if !g.is_valid_public(&b.public) || !g.is_valid_public(&a.public) {
                    continue;
                }
                assert_eq!(g.shared(&a.private, &b.public).unwrap(), g.shared(&b.private, &a.public).unwrap());
            }
        }
    }

    #[test]
    fn identity_and_garbage_peers_rejected() {
        let toy = GroupParams::default_toy();
        let kp = toy.keygen(&mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(toy.shared(&kp.private, &1u64.to_be_bytes()), Err(CryptoError::InvalidPoint));
        assert_eq!(toy.shared(&kp.private, &0u64.to_be_bytes()), Err(CryptoError::InvalidPoint));
        assert_eq!(toy.shared(&kp.private, &[1, 2, 3]), Err(CryptoError::InvalidPoint));

        let ecc = GroupParams::ecc160();
        let kp = ecc.keygen(&mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(ecc.shared(&kp.private, &[0u8; 21]), Err(CryptoError::InvalidPoint));
        // Flipping x lands on a valid x about half the time; find one that is off-curve.
        let mut rejected = false;
        for bit in 0..8 {
            let mut p = kp.public.clone();
            p[20] ^= 1 << bit;
            if ecc.shared(&kp.private, &p).is_err() {
                rejected = true;
            }
        }
        assert!(rejected);
    }

    #[test]
    fn ecc_generator_has_curve_order() {
        let c = curve();
        let g = Affine { x: c.gx.clone(), y: c.gy.clone() };
        assert_eq!(scalar_mul(&c.n, &g), None);
        assert_eq!(scalar_mul(&(&c.n - 1u32), &g).unwrap().x, c.gx);
    }

    // 5G computed with an independent affine double-and-add in Python.
    #[test]
    fn ecc_known_multiple() {
        let kp = GroupParams::ecc160().keypair_from_private(&scalar(5)).unwrap();
        let mut expected = vec![0x02];
        expected.extend(hex("e705b180e41192ed772d1e2d424c171303ad6c4e").to_bytes_be());
        // y = 0x933f...a59c is even.
        assert_eq!(kp.public, expected);
    }

    #[test]
    fn ecc_agreement_on_random_pairs() {
        let g = GroupParams::ecc160();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a = g.keygen(&mut rng);
            let b = g.keygen(&mut rng);
            assert_eq!(a.public.len(), 21);
            assert_eq!(g.shared(&a.private, &b.public).unwrap(), g.shared(&b.private, &a.public).unwrap());
        }
    }

    #[test]
    fn private_scalar_range() {
        let g = GroupParams::toy(101, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let kp = g.keygen(&mut rng);
            let k = BigUint::from_bytes_be(&kp.private.0);
            assert!(k >= BigUint::one() && k < g.order());
        }
        assert_eq!(g.keypair_from_private(&scalar(0)), Err(CryptoError::InvalidScalar));
        assert_eq!(g.keypair_from_private(&scalar(100)), Err(CryptoError::InvalidScalar));
    }

    #[test]
    fn miller_rabin_small_cases() {
        let primes: Vec<u64> = (2..200).filter(|&n| (2..n).all(|d| n % d != 0)).collect();
        for n in 0..200u64 {
            assert_eq!(is_prime_u64(n), primes.contains(&n), "{n}");
        }
    }
}
