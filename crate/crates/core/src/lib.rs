//! Counting 1324-avoiding permutations by memoized recursion over canonical
//! prefix signatures, with modular arithmetic and CRT reconstruction.

pub mod codec;
pub mod enumerate;
pub mod error;
pub mod memo;
pub mod modular;
pub mod oracles;
pub mod series;
pub mod signature;

pub use codec::{decode, encode, BitKey};
pub use enumerate::{
    auto_primes, count_signature, crt_combine, crt_reconstruct, enumerate, enumerate_series,
    required_prime_count, series_bigint, series_mod, Enumeration, Mode,
};
pub use error::{CodecError, EnumError, OracleError, ParseError, SignatureError};
pub use memo::{MemoStats, MemoStore};
pub use modular::{BigCount, CountRing, ModularValue, Modulus, DEFAULT_PRIMES};
pub use oracles::{
    asym_eval, brute_count, contains_pattern, p1234, p1342, AsymptoticParams, Pattern,
};
pub use series::{RunManifest, RunOptions, SeriesMetadata, SeriesTable};
pub use signature::{canonicalize, prefix_to_signature, Item, Placement, RawSignature, Signature};
