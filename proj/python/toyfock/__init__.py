# Copyright 2026 The toyfock Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Toy Fock space approximation of quantum stochastic integrals."""

from toyfock._core import (
    ConfigError,
    CoupledOperator,
    ExperimentConfig,
    Partition,
    RateFit,
    StepFunction,
    ToyState,
    csv_to_markdown,
    embed_exponential,
    exp_inner,
    fit_rate,
    gradient_norm_sq,
    ito_identity_residual,
    ito_limit_element,
    l2_inner,
    lambda_element,
    load_config,
    noise,
    norm_constant,
    parse_config,
    random_operator,
    run_study,
    run_validate,
    set_thread_count,
    sigma_apply,
    sigma_element,
    triangle_left,
    triangle_right,
)

__version__ = "0.1.0"
