//! The operator hierarchy `DS ⊂ SDS ⊂ Markov`: sequence matrices, operators
//! on step functions aligned to partitions, integral kernels, and witnesses.

pub mod kernel;
pub mod matrix;
pub mod partition;
pub mod step_operator;
pub mod witness;

pub use kernel::{matrix_to_kernel, StepKernel};
pub use matrix::{l1_norm, OperatorClass, OperatorMatrix};
pub use partition::{averaging_operator, partition_average, phi, psi, AlignedFunction, Overlap, Partition};
pub use step_operator::{lift, lift_markov, restrict, StepOperator};
pub use witness::{ds_witness, sds_approx_sequence, t_transform_chain, ApproxStep, SequenceMode, TTransform, WitnessChain};
