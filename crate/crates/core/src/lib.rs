//! JUNA: a knapsack-type public-key scheme that encodes plaintexts as bit-pairs,
//! raises public-key items to bit-pair shadows, and randomizes the item
//! placement with a per-encryption r-string (the "probabilistic maze").
//!
//! The crate is split along the scheme's layers:
//!
//! * [`arith`]: modular arithmetic, structured prime moduli, generators.
//! * [`shadow`]: bit shadows and bit-pair shadows.
//! * [`coprime`]: coprime sequences and their subset products.
//! * [`keygen`]: profiles, the lever set, and key pairs.
//! * [`codec`]: probabilistic encryption and maze-search decryption.
//! * [`analysis`]: densities, cost estimates, ASSP conversion, the
//!   meet-in-the-middle solver, and the exhaustive census.
//! * [`format`]: text key files and plaintext/ciphertext encodings.
//!
//! Data-parallel loops go through [`Execution`]; with the `parallel` feature
//! disabled every mode runs sequentially.

pub mod analysis;
pub mod arith;
pub mod codec;
pub mod coprime;
mod error;
pub mod exec;
pub mod format;
pub mod keygen;
pub mod shadow;

pub use codec::{decrypt, encrypt, encrypt_deterministic, Ciphertext, Decryption, EncryptionTranscript};
pub use error::{Error, Result};
pub use exec::Execution;
pub use keygen::{keygen, DebugKey, KeyPair, PrivateKey, PublicKey, SchemeProfile};
pub use shadow::{BitPairString, BitString, PairShadowString};
