//! Information content and shared information of time-aligned multimodal
//! streams.
//!
//! Continuous feature streams are discretized with per-modality K-means
//! codebooks, discrete streams are used as-is, and every entropic quantity is
//! a plug-in estimate over the empirical joint distribution of aligned frames:
//!
//! * [`ingestion`]: stream types, FMX1/LBL1 files, manifests, frame alignment.
//! * [`quantizer`]: k-means++ seeded Lloyd iterations and KMC1 codebooks.
//! * [`infotheory`]: entropy, MI, conditional quantities, co-information and
//!   the seven-region information diagram.
//! * [`pipeline`]: end-to-end analysis and cluster-count sweeps.
//! * [`synthetic`]: sources with known information content and a dense
//!   brute-force oracle.

pub mod error;
pub mod infotheory;
pub mod ingestion;
pub mod pipeline;
pub mod quantizer;
pub mod rng;
pub mod synthetic;

pub use error::{Error, Result};
pub use infotheory::{
    conditional_entropy, conditional_mutual_information, entropy, info_diagram, joint_counts,
    multivariate_mi_recursive, mutual_information, trivariate_mmi, InfoDiagram, InfoQuantities,
    JointDistribution, LogBase,
};
pub use ingestion::{
    align, load_manifest, read_feature_matrix, read_labels, write_feature_matrix, write_labels,
    AlignedDataset, FeatureMatrix, LabelSequence, Manifest, StreamKind, StreamSpec,
};
pub use pipeline::{analyze, sweep_clusters, AnalysisConfig, InfoReport, StreamReport};
pub use quantizer::{assign, fit, load_codebook, save_codebook, Codebook, FitParams};
pub use synthetic::{
    exhaustive_stream, gen_gaussian_mixture, oracle_quantities, sample_discrete, JointPmf,
};
