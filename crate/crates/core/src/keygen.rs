//! The three key-generation strategies, their decompression counterparts,
//! parameter validation, key serialization, and the public-key size formulas.
//!
//! Each strategy sits behind [`KeyGenerator`] and is selected at runtime by
//! variant number or name (see [`generator`] / [`generator_by_name`]).

use std::sync::Arc;

use crate::gf::{Fe, FieldSpec, GfError};
use crate::matgf::{LinearOutcome, MatError, MatGF};
use crate::prg::{PrgStream, Seed, SeedError};

#[derive(Debug, thiserror::Error)]
pub enum KeygenError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("malformed key: {0}")]
    MalformedKey(String),
    #[error("retry limit exceeded (pathological parameter choice)")]
    RetryLimitExceeded,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error(transparent)]
    Seed(#[from] SeedError),
}

/// KeyGen3 retries with fresh seeds on a singular system or a rank deficit;
/// hitting this cap means the parameters are pathological, not bad luck.
const RETRY_LIMIT: u32 = 1000;

/// MinRank parameters (q, m, n, k, r, lambda) with the overdetermined-regime
/// invariants checked at construction.
#[derive(Debug, Clone)]
pub struct Params {
    pub q: u32,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub lambda: u32,
    pub field: Arc<FieldSpec>,
}

impl Params {
    pub fn new(q: u32, m: usize, n: usize, k: usize, r: usize, lambda: u32) -> Result<Self, KeygenError> {
        let field = FieldSpec::of_order(q)
            .map_err(|e| KeygenError::InvalidParams(format!("q = {q}: {e}")))?;
        if !(m >= n && n > r && r > 0) {
            return Err(KeygenError::InvalidParams(format!(
                "need m >= n > r > 0, got m = {m}, n = {n}, r = {r}"
            )));
        }
        if k == 0 || k >= (m - r) * (n - r) {
            return Err(KeygenError::InvalidParams(format!(
                "need 0 < k < (m - r)(n - r) = {}, got k = {k}",
                (m - r) * (n - r)
            )));
        }
        if lambda == 0 || lambda % 8 != 0 {
            return Err(KeygenError::InvalidParams(format!(
                "lambda = {lambda} must be a positive multiple of 8"
            )));
        }
        Ok(Params { q, m, n, k, r, lambda, field })
    }

    /// Shape-checked construction without the overdetermined condition, for
    /// analysis code that manipulates instances outside the keygen regime.
    pub fn new_relaxed(q: u32, m: usize, n: usize, k: usize, r: usize, lambda: u32) -> Result<Self, KeygenError> {
        let field = FieldSpec::of_order(q)
            .map_err(|e| KeygenError::InvalidParams(format!("q = {q}: {e}")))?;
        if !(m >= n && n > r && r > 0) || k == 0 || k >= m * n {
            return Err(KeygenError::InvalidParams(format!(
                "bad shape (m = {m}, n = {n}, k = {k}, r = {r})"
            )));
        }
        Ok(Params { q, m, n, k, r, lambda, field })
    }

    pub fn seed_bytes(&self) -> usize {
        self.lambda as usize / 8
    }
}

/// The named parameter sets: the six production sets plus two toy sets small
/// enough for the exhaustive solver.
pub const REGISTRY: &[(&str, u32, usize, usize, usize, usize, u32)] = &[
    ("mirith-Ia", 16, 15, 15, 78, 6, 128),
    ("mirith-Ib", 16, 16, 16, 142, 4, 128),
    ("mirith-IIIa", 16, 19, 19, 109, 8, 192),
    ("mirith-IIIb", 16, 19, 19, 167, 6, 192),
    ("mirith-Va", 16, 21, 21, 189, 7, 256),
    ("mirith-Vb", 16, 22, 22, 254, 6, 256),
    ("toy-2-3-3-2-1", 2, 3, 3, 2, 1, 128),
    ("toy-3-4-4-3-2", 3, 4, 4, 3, 2, 128),
];

pub fn params_by_name(name: &str) -> Option<Params> {
    REGISTRY
        .iter()
        .find(|row| row.0 == name)
        .map(|&(_, q, m, n, k, r, lambda)| {
            Params::new(q, m, n, k, r, lambda).expect("registry entries are valid")
        })
}

/// Names of the six production parameter sets, in Table order.
pub fn production_set_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|r| r.0).filter(|n| n.starts_with("mirith")).collect()
}

pub fn toy_set_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|r| r.0).filter(|n| n.starts_with("toy")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    V1,
    V2,
    V3,
}

impl Variant {
    pub fn number(self) -> u8 {
        match self {
            Variant::V1 => 1,
            Variant::V2 => 2,
            Variant::V3 => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Variant> {
        match n {
            1 => Some(Variant::V1),
            2 => Some(Variant::V2),
            3 => Some(Variant::V3),
            _ => None,
        }
    }

    pub fn all() -> [Variant; 3] {
        [Variant::V1, Variant::V2, Variant::V3]
    }
}

/// A MinRank instance (M_0, ..., M_k).
#[derive(Debug, Clone)]
pub struct MinRankInstance {
    /// matrices[0] is M_0, matrices[i] is M_i
    pub matrices: Vec<MatGF>,
    pub params: Params,
}

impl MinRankInstance {
    /// E(alpha) = M_0 + sum_i alpha_i M_i.
    pub fn eval(&self, alpha: &[Fe]) -> Result<MatGF, KeygenError> {
        if alpha.len() != self.params.k {
            return Err(KeygenError::InvalidParams(format!(
                "alpha length {} for k = {}",
                alpha.len(),
                self.params.k
            )));
        }
        let mut e = self.matrices[0].clone();
        for (i, &a) in alpha.iter().enumerate() {
            if a != 0 {
                e = e.add(&self.matrices[i + 1].scale(a))?;
            }
        }
        Ok(e)
    }
}

/// The secret solution: alpha, the rank-r matrix E, and (for variant 3) K.
#[derive(Debug, Clone)]
pub struct Witness {
    pub alpha: Vec<Fe>,
    pub e: MatGF,
    pub k_mat: Option<MatGF>,
}

impl Witness {
    /// Checks rank(E) = r and E = M_0 + sum alpha_i M_i, plus E^L = E^R K
    /// when K is present.
    pub fn is_valid_for(&self, inst: &MinRankInstance) -> bool {
        let p = &inst.params;
        if self.e.rank() != p.r {
            return false;
        }
        match inst.eval(&self.alpha) {
            Ok(e) if e == self.e => {}
            _ => return false,
        }
        if let Some(k) = &self.k_mat {
            let Ok((el, er)) = self.e.split_lr(p.r) else {
                return false;
            };
            match er.mul(k) {
                Ok(prod) if prod == el => {}
                _ => return false,
            }
        }
        true
    }
}

/// Variant-tagged compressed public key: a seed plus packed field elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    pub variant: Variant,
    pub seed_pk: Seed,
    pub payload: Vec<Fe>,
}

/// Variant-tagged compressed secret key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SecretKey {
    /// Variants 1 and 2: a single root seed from which seed_pk is derived.
    Root { variant: Variant, root: Seed },
    /// Variant 3 stores both seeds.
    TwoSeeds { seed_pk: Seed, seed_sk: Seed },
}

impl SecretKey {
    pub fn variant(&self) -> Variant {
        match self {
            SecretKey::Root { variant, .. } => *variant,
            SecretKey::TwoSeeds { .. } => Variant::V3,
        }
    }
}

/// Number of payload elements in the compressed public key.
pub fn payload_len(p: &Params, variant: Variant) -> usize {
    match variant {
        Variant::V1 => p.m * p.n,
        Variant::V2 => p.m * p.n - p.k,
        Variant::V3 => p.m * (p.n - p.r) - p.k,
    }
}

/// Exact public-key size in bits: lambda + (payload elements) * log2(q),
/// rounded up when log2(q) is not an integer.
pub fn pk_size_bits(p: &Params, variant: Variant) -> u64 {
    let count = payload_len(p, variant) as u64;
    let lambda = p.lambda as u64;
    if p.q.is_power_of_two() {
        lambda + count * p.q.trailing_zeros() as u64
    } else {
        lambda + ((count as f64) * (p.q as f64).log2()).ceil() as u64
    }
}

pub fn sk_size_bits(p: &Params, variant: Variant) -> u64 {
    match variant {
        Variant::V1 | Variant::V2 => p.lambda as u64,
        Variant::V3 => 2 * p.lambda as u64,
    }
}

// ---------------------------------------------------------------------------
// wire format

/// Packs elements per the normative encoding: one nibble (low first within a
/// byte) for q <= 16, one byte for q <= 256, two little-endian bytes above.
pub fn pack_elements(elems: &[Fe], f: &FieldSpec) -> Vec<u8> {
    match f.encoded_bits() {
        4 => {
            let mut out = vec![0u8; (elems.len() + 1) / 2];
            for (i, &e) in elems.iter().enumerate() {
                out[i / 2] |= (e as u8 & 0xF) << (4 * (i % 2));
            }
            out
        }
        8 => elems.iter().map(|&e| e as u8).collect(),
        _ => elems
            .iter()
            .flat_map(|&e| e.to_le_bytes())
            .collect(),
    }
}

pub fn unpack_elements(bytes: &[u8], count: usize, f: &FieldSpec) -> Result<Vec<Fe>, KeygenError> {
    let bits = f.encoded_bits() as usize;
    let expect = (count * bits + 7) / 8;
    if bytes.len() != expect {
        return Err(KeygenError::MalformedKey(format!(
            "payload of {} bytes, expected {expect}",
            bytes.len()
        )));
    }
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let v: Fe = match bits {
            4 => ((bytes[i / 2] >> (4 * (i % 2))) & 0xF) as Fe,
            8 => bytes[i] as Fe,
            _ => u16::from_le_bytes([bytes[2 * i], bytes[2 * i + 1]]),
        };
        if !f.is_valid(v) {
            return Err(KeygenError::MalformedKey(format!(
                "element {v} out of range for GF({})",
                f.order()
            )));
        }
        out.push(v);
    }
    Ok(out)
}

impl PublicKey {
    /// seed_pk bytes followed by the packed payload.
    pub fn to_bytes(&self, p: &Params) -> Vec<u8> {
        let mut out = self.seed_pk.bytes().to_vec();
        out.extend(pack_elements(&self.payload, &p.field));
        out
    }

    pub fn from_bytes(bytes: &[u8], p: &Params, variant: Variant) -> Result<Self, KeygenError> {
        let sb = p.seed_bytes();
        if bytes.len() < sb {
            return Err(KeygenError::MalformedKey("public key shorter than seed".into()));
        }
        let seed_pk = Seed::new(bytes[..sb].to_vec(), p.lambda)?;
        let payload = unpack_elements(&bytes[sb..], payload_len(p, variant), &p.field)?;
        Ok(PublicKey { variant, seed_pk, payload })
    }
}

impl SecretKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            SecretKey::Root { root, .. } => root.bytes().to_vec(),
            SecretKey::TwoSeeds { seed_pk, seed_sk } => {
                let mut out = seed_pk.bytes().to_vec();
                out.extend_from_slice(seed_sk.bytes());
                out
            }
        }
    }

    pub fn from_bytes(bytes: &[u8], p: &Params, variant: Variant) -> Result<Self, KeygenError> {
        let sb = p.seed_bytes();
        match variant {
            Variant::V1 | Variant::V2 => {
                if bytes.len() != sb {
                    return Err(KeygenError::MalformedKey(format!(
                        "secret key of {} bytes, expected {sb}",
                        bytes.len()
                    )));
                }
                Ok(SecretKey::Root {
                    variant,
                    root: Seed::new(bytes.to_vec(), p.lambda)?,
                })
            }
            Variant::V3 => {
                if bytes.len() != 2 * sb {
                    return Err(KeygenError::MalformedKey(format!(
                        "secret key of {} bytes, expected {}",
                        bytes.len(),
                        2 * sb
                    )));
                }
                Ok(SecretKey::TwoSeeds {
                    seed_pk: Seed::new(bytes[..sb].to_vec(), p.lambda)?,
                    seed_sk: Seed::new(bytes[sb..].to_vec(), p.lambda)?,
                })
            }
        }
    }
}

// ---------------------------------------------------------------------------
// seed expansion shared by the variants

/// Expands seed_pk into M_1, ..., M_k, each a uniform m x n matrix.
fn expand_uniform_family(seed_pk: &Seed, p: &Params) -> Vec<MatGF> {
    let mut prg = PrgStream::init(seed_pk, b"PK");
    (0..p.k).map(|_| prg.next_matrix(p.m, p.n, &p.field)).collect()
}

/// Expands a stream into (M_1, ..., M_k) in the patterned family: the first k
/// vectorized entries of M_i are the Kronecker pattern delta_{i,j} and are not
/// drawn; the remaining mn - k entries follow in vectorization order.
fn next_patterned_family(prg: &mut PrgStream, p: &Params) -> Vec<MatGF> {
    let mn = p.m * p.n;
    (0..p.k)
        .map(|i| {
            let mut v = vec![0 as Fe; mn];
            v[i] = 1;
            for slot in v.iter_mut().take(mn).skip(p.k) {
                *slot = prg.next_fe(&p.field);
            }
            MatGF::devectorize(&v, p.m, p.n, &p.field).expect("length mn")
        })
        .collect()
}

/// Derives (seed_pk, remainder-of-stream) from a root seed, tag "ROOT".
fn derive_root(root: &Seed, p: &Params) -> (Seed, PrgStream) {
    let mut stream = PrgStream::init(root, b"ROOT");
    let seed_pk = stream.next_seed(p.lambda);
    (seed_pk, stream)
}

// ---------------------------------------------------------------------------
// the strategy trait and the three generators

pub trait KeyGenerator: Sync {
    fn variant(&self) -> Variant;
    fn name(&self) -> &'static str;
    fn generate(&self, root: &Seed, p: &Params) -> Result<(PublicKey, SecretKey), KeygenError>;
    fn decompress_pk(&self, pk: &PublicKey, p: &Params) -> Result<MinRankInstance, KeygenError>;
    fn decompress_sk(&self, sk: &SecretKey, p: &Params) -> Result<(MinRankInstance, Witness), KeygenError>;
}

fn check_seed(root: &Seed, p: &Params) -> Result<(), KeygenError> {
    if root.bit_len() != p.lambda {
        return Err(KeygenError::InvalidParams(format!(
            "seed of {} bits for lambda = {}",
            root.bit_len(),
            p.lambda
        )));
    }
    Ok(())
}

/// The classic generator: a fully uniform instance, with M_0 stored whole.
pub struct KeyGen1;

impl KeyGen1 {
    /// Shared by generate and decompress_sk so the two stay in lockstep.
    fn expand(root: &Seed, p: &Params) -> Result<(Seed, MinRankInstance, Witness), KeygenError> {
        let (seed_pk, mut sk_stream) = derive_root(root, p);
        let family = expand_uniform_family(&seed_pk, p);
        let alpha: Vec<Fe> = (0..p.k).map(|_| sk_stream.next_fe(&p.field)).collect();
        let e = MatGF::sample_rank_r(&mut sk_stream, p.m, p.n, p.r, &p.field)?.e;
        // M_0 = E - sum alpha_i M_i
        let mut m0 = e.clone();
        for (i, &a) in alpha.iter().enumerate() {
            if a != 0 {
                m0 = m0.sub(&family[i].scale(a))?;
            }
        }
        let mut matrices = vec![m0];
        matrices.extend(family);
        let inst = MinRankInstance { matrices, params: p.clone() };
        let wit = Witness { alpha, e, k_mat: None };
        Ok((seed_pk, inst, wit))
    }
}

impl KeyGenerator for KeyGen1 {
    fn variant(&self) -> Variant {
        Variant::V1
    }

    fn name(&self) -> &'static str {
        "keygen1"
    }

    fn generate(&self, root: &Seed, p: &Params) -> Result<(PublicKey, SecretKey), KeygenError> {
        check_seed(root, p)?;
        let (seed_pk, inst, _wit) = Self::expand(root, p)?;
        let pk = PublicKey {
            variant: Variant::V1,
            seed_pk,
            payload: inst.matrices[0].vectorize(),
        };
        let sk = SecretKey::Root { variant: Variant::V1, root: root.clone() };
        Ok((pk, sk))
    }

    fn decompress_pk(&self, pk: &PublicKey, p: &Params) -> Result<MinRankInstance, KeygenError> {
        expect_variant(pk.variant, Variant::V1)?;
        if pk.payload.len() != p.m * p.n {
            return Err(KeygenError::MalformedKey("wrong payload length".into()));
        }
        let m0 = MatGF::devectorize(&pk.payload, p.m, p.n, &p.field)?;
        let mut matrices = vec![m0];
        matrices.extend(expand_uniform_family(&pk.seed_pk, p));
        Ok(MinRankInstance { matrices, params: p.clone() })
    }

    fn decompress_sk(&self, sk: &SecretKey, p: &Params) -> Result<(MinRankInstance, Witness), KeygenError> {
        let SecretKey::Root { variant: Variant::V1, root } = sk else {
            return Err(KeygenError::MalformedKey("variant mismatch".into()));
        };
        check_seed(root, p)?;
        let (_, inst, wit) = Self::expand(root, p)?;
        Ok((inst, wit))
    }
}

/// The patterned-family generator: (M_1, ..., M_k) carry the Kronecker
/// pattern, alpha_i := <E>_i cancels the first k entries of <M_0>, and only
/// the remaining mn - k entries are stored.
pub struct KeyGen2;

impl KeyGen2 {
    fn expand(root: &Seed, p: &Params) -> Result<(Seed, MinRankInstance, Witness), KeygenError> {
        let (seed_pk, mut sk_stream) = derive_root(root, p);
        let mut pk_stream = PrgStream::init(&seed_pk, b"PK");
        let family = next_patterned_family(&mut pk_stream, p);
        let e = MatGF::sample_rank_r(&mut sk_stream, p.m, p.n, p.r, &p.field)?.e;
        let ev = e.vectorize();
        let alpha: Vec<Fe> = ev[..p.k].to_vec();
        let mut m0 = e.clone();
        for (i, &a) in alpha.iter().enumerate() {
            if a != 0 {
                m0 = m0.sub(&family[i].scale(a))?;
            }
        }
        let mut matrices = vec![m0];
        matrices.extend(family);
        let inst = MinRankInstance { matrices, params: p.clone() };
        let wit = Witness { alpha, e, k_mat: None };
        Ok((seed_pk, inst, wit))
    }
}

impl KeyGenerator for KeyGen2 {
    fn variant(&self) -> Variant {
        Variant::V2
    }

    fn name(&self) -> &'static str {
        "keygen2"
    }

    fn generate(&self, root: &Seed, p: &Params) -> Result<(PublicKey, SecretKey), KeygenError> {
        check_seed(root, p)?;
        let (seed_pk, inst, _wit) = Self::expand(root, p)?;
        let m0v = inst.matrices[0].vectorize();
        debug_assert!(m0v[..p.k].iter().all(|&x| x == 0));
        let pk = PublicKey {
            variant: Variant::V2,
            seed_pk,
            payload: m0v[p.k..].to_vec(),
        };
        let sk = SecretKey::Root { variant: Variant::V2, root: root.clone() };
        Ok((pk, sk))
    }

    fn decompress_pk(&self, pk: &PublicKey, p: &Params) -> Result<MinRankInstance, KeygenError> {
        expect_variant(pk.variant, Variant::V2)?;
        if pk.payload.len() != p.m * p.n - p.k {
            return Err(KeygenError::MalformedKey("wrong payload length".into()));
        }
        let mut v = vec![0 as Fe; p.k];
        v.extend_from_slice(&pk.payload);
        let m0 = MatGF::devectorize(&v, p.m, p.n, &p.field)?;
        let mut pk_stream = PrgStream::init(&pk.seed_pk, b"PK");
        let mut matrices = vec![m0];
        matrices.extend(next_patterned_family(&mut pk_stream, p));
        Ok(MinRankInstance { matrices, params: p.clone() })
    }

    fn decompress_sk(&self, sk: &SecretKey, p: &Params) -> Result<(MinRankInstance, Witness), KeygenError> {
        let SecretKey::Root { variant: Variant::V2, root } = sk else {
            return Err(KeygenError::MalformedKey("variant mismatch".into()));
        };
        check_seed(root, p)?;
        let (_, inst, wit) = Self::expand(root, p)?;
        Ok((inst, wit))
    }
}

/// The canonical-form generator: the instance lands in canonical form by
/// solving a k x k linear system for alpha, and only m(n - r) - k elements of
/// M_0 are stored.
pub struct KeyGen3;

/// Everything KeyGen3 derives from a (seed_pk, seed_sk) pair, shared between
/// generation and secret-key decompression.
struct KeyGen3Expansion {
    m0_right: MatGF,
    family: Vec<MatGF>,
    k_mat: MatGF,
    alpha: Vec<Fe>,
}

impl KeyGen3 {
    /// Expands the seeds and solves the linear system forcing M_0 into the
    /// canonical family; `None` means the system was singular.
    fn expand_seeds(seed_pk: &Seed, seed_sk: &Seed, p: &Params) -> Result<Option<KeyGen3Expansion>, KeygenError> {
        let mut pk_stream = PrgStream::init(seed_pk, b"PK");
        let m0_right = pk_stream.next_matrix(p.m, p.r, &p.field);
        let family = next_patterned_family(&mut pk_stream, p);
        let mut sk_stream = PrgStream::init(seed_sk, b"SK");
        let k_mat = sk_stream.next_matrix(p.r, p.n - p.r, &p.field);

        // system: (I - X) alpha = rhs, with X[i][j] = <M_j^R K>_i and
        // rhs_i = <M_0^R K>_i
        let mut a = MatGF::identity(p.k, &p.field);
        for j in 0..p.k {
            let (_, mj_right) = family[j].split_lr(p.r)?;
            let prod = mj_right.mul(&k_mat)?;
            let pv = prod.vectorize();
            for i in 0..p.k {
                let cur = a.get(i, j);
                a.set(i, j, crate::gf::fe_sub(cur, pv[i], &p.field));
            }
        }
        let rhs_full = m0_right.mul(&k_mat)?.vectorize();
        let rhs = &rhs_full[..p.k];

        match a.solve_linear(rhs)? {
            LinearOutcome::Singular => Ok(None),
            LinearOutcome::UniqueSolution(alpha) => Ok(Some(KeyGen3Expansion {
                m0_right,
                family,
                k_mat,
                alpha,
            })),
        }
    }

    /// E^R = M_0^R + sum alpha_j M_j^R.
    fn e_right(exp: &KeyGen3Expansion, p: &Params) -> Result<MatGF, KeygenError> {
        let mut er = exp.m0_right.clone();
        for (j, &a) in exp.alpha.iter().enumerate() {
            if a != 0 {
                let (_, mj_right) = exp.family[j].split_lr(p.r)?;
                er = er.add(&mj_right.scale(a))?;
            }
        }
        Ok(er)
    }

    /// M_0^L = E^R K - sum alpha_j M_j^L; the first k vectorized entries are
    /// zero by construction of alpha.
    fn m0_left(exp: &KeyGen3Expansion, er: &MatGF, p: &Params) -> Result<MatGF, KeygenError> {
        let mut m0l = er.mul(&exp.k_mat)?;
        for (j, &a) in exp.alpha.iter().enumerate() {
            if a != 0 {
                let (mj_left, _) = exp.family[j].split_lr(p.r)?;
                m0l = m0l.sub(&mj_left.scale(a))?;
            }
        }
        Ok(m0l)
    }

    fn assemble(exp: &KeyGen3Expansion, er: &MatGF, p: &Params) -> Result<(MinRankInstance, Witness), KeygenError> {
        let m0l = Self::m0_left(exp, er, p)?;
        let m0lv = m0l.vectorize();
        if m0lv[..p.k].iter().any(|&x| x != 0) {
            return Err(KeygenError::InternalInconsistency(
                "first k entries of <M_0^L> are not zero".into(),
            ));
        }
        let m0 = MatGF::join_lr(&m0l, &exp.m0_right)?;
        let e = MatGF::join_lr(&er.mul(&exp.k_mat)?, er)?;
        let mut matrices = vec![m0];
        matrices.extend(exp.family.iter().cloned());
        let inst = MinRankInstance { matrices, params: p.clone() };
        let wit = Witness {
            alpha: exp.alpha.clone(),
            e,
            k_mat: Some(exp.k_mat.clone()),
        };
        Ok((inst, wit))
    }
}

impl KeyGenerator for KeyGen3 {
    fn variant(&self) -> Variant {
        Variant::V3
    }

    fn name(&self) -> &'static str {
        "keygen3"
    }

    fn generate(&self, root: &Seed, p: &Params) -> Result<(PublicKey, SecretKey), KeygenError> {
        check_seed(root, p)?;
        for iter in 0..RETRY_LIMIT {
            // fresh seeds each attempt keep the output distribution uniform
            // conditioned on success
            let mut tag = b"ITER".to_vec();
            tag.extend_from_slice(&iter.to_le_bytes());
            let mut iter_stream = PrgStream::init(root, &tag);
            let seed_pk = iter_stream.next_seed(p.lambda);
            let seed_sk = iter_stream.next_seed(p.lambda);

            let Some(exp) = Self::expand_seeds(&seed_pk, &seed_sk, p)? else {
                continue;
            };
            let er = Self::e_right(&exp, p)?;
            if er.rank_leakfree(&mut iter_stream)? < p.r {
                continue;
            }
            let m0l = Self::m0_left(&exp, &er, p)?;
            let m0lv = m0l.vectorize();
            if m0lv[..p.k].iter().any(|&x| x != 0) {
                return Err(KeygenError::InternalInconsistency(
                    "first k entries of <M_0^L> are not zero".into(),
                ));
            }
            let pk = PublicKey {
                variant: Variant::V3,
                seed_pk: seed_pk.clone(),
                payload: m0lv[p.k..].to_vec(),
            };
            let sk = SecretKey::TwoSeeds { seed_pk, seed_sk };
            return Ok((pk, sk));
        }
        Err(KeygenError::RetryLimitExceeded)
    }

    fn decompress_pk(&self, pk: &PublicKey, p: &Params) -> Result<MinRankInstance, KeygenError> {
        expect_variant(pk.variant, Variant::V3)?;
        if pk.payload.len() != p.m * (p.n - p.r) - p.k {
            return Err(KeygenError::MalformedKey("wrong payload length".into()));
        }
        let mut pk_stream = PrgStream::init(&pk.seed_pk, b"PK");
        let m0_right = pk_stream.next_matrix(p.m, p.r, &p.field);
        let family = next_patterned_family(&mut pk_stream, p);
        let mut v = vec![0 as Fe; p.k];
        v.extend_from_slice(&pk.payload);
        let m0_left = MatGF::devectorize(&v, p.m, p.n - p.r, &p.field)?;
        let m0 = MatGF::join_lr(&m0_left, &m0_right)?;
        let mut matrices = vec![m0];
        matrices.extend(family);
        Ok(MinRankInstance { matrices, params: p.clone() })
    }

    fn decompress_sk(&self, sk: &SecretKey, p: &Params) -> Result<(MinRankInstance, Witness), KeygenError> {
        let SecretKey::TwoSeeds { seed_pk, seed_sk } = sk else {
            return Err(KeygenError::MalformedKey("variant mismatch".into()));
        };
        check_seed(seed_pk, p)?;
        check_seed(seed_sk, p)?;
        let Some(exp) = KeyGen3::expand_seeds(seed_pk, seed_sk, p)? else {
            // impossible for honestly generated keys
            return Err(KeygenError::InternalInconsistency(
                "regenerated system is singular".into(),
            ));
        };
        let er = KeyGen3::e_right(&exp, p)?;
        KeyGen3::assemble(&exp, &er, p)
    }
}

fn expect_variant(got: Variant, want: Variant) -> Result<(), KeygenError> {
    if got != want {
        return Err(KeygenError::MalformedKey(format!(
            "variant {} key given to variant {} routine",
            got.number(),
            want.number()
        )));
    }
    Ok(())
}

static KEYGEN1: KeyGen1 = KeyGen1;
static KEYGEN2: KeyGen2 = KeyGen2;
static KEYGEN3: KeyGen3 = KeyGen3;

/// Runtime strategy selection by variant.
pub fn generator(v: Variant) -> &'static dyn KeyGenerator {
    match v {
        Variant::V1 => &KEYGEN1,
        Variant::V2 => &KEYGEN2,
        Variant::V3 => &KEYGEN3,
    }
}

pub fn generator_by_name(name: &str) -> Option<&'static dyn KeyGenerator> {
    Variant::all()
        .into_iter()
        .map(generator)
        .find(|g| g.name() == name)
}

/// One row of the public-key size comparison.
pub struct SizeRow {
    pub name: &'static str,
    pub lambda: u32,
    pub q: u32,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub sizes: [u64; 3],
}

pub fn size_table() -> Vec<SizeRow> {
    production_set_names()
        .into_iter()
        .map(|name| {
            let p = params_by_name(name).unwrap();
            SizeRow {
                name,
                lambda: p.lambda,
                q: p.q,
                m: p.m,
                n: p.n,
                k: p.k,
                r: p.r,
                sizes: [
                    pk_size_bits(&p, Variant::V1),
                    pk_size_bits(&p, Variant::V2),
                    pk_size_bits(&p, Variant::V3),
                ],
            }
        })
        .collect()
}

/// The comparison table as text, one row per production parameter set.
pub fn render_size_table() -> String {
    let mut out = String::new();
    out.push_str("set          lambda   q   m   n    k   r   pk1   pk2   pk3\n");
    for row in size_table() {
        out.push_str(&format!(
            "{:<12} {:>6} {:>3} {:>3} {:>3} {:>4} {:>3} {:>5} {:>5} {:>5}\n",
            row.name, row.lambda, row.q, row.m, row.n, row.k, row.r,
            row.sizes[0], row.sizes[1], row.sizes[2],
        ));
    }
    out
}
