# Copyright 2026 The codemix Authors.
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

"""Python bindings for the codemix Hinglish sentiment toolkit."""

import json

from ._core import (
    PIPELINE_VERSION,
    DivergenceError,
    InputError,
    TermIndex,
    Vocabulary,
    clean_text,
    decode,
    encode,
    fit_term_index,
    is_noise,
    label_name,
    preprocess_text,
    run_cli,
    split_sizes,
    tfidf,
    tokenize,
    train_vocabulary,
)
from ._core import _evaluate_json

__all__ = [
    "PIPELINE_VERSION",
    "DivergenceError",
    "InputError",
    "TermIndex",
    "Vocabulary",
    "clean_text",
    "decode",
    "encode",
    "evaluate",
    "fit_term_index",
    "is_noise",
    "label_name",
    "preprocess_text",
    "run_cli",
    "split_sizes",
    "tfidf",
    "tokenize",
    "train_vocabulary",
]


def evaluate(y_true, y_pred):
    """Accuracy, per-class and weighted metrics for label ids 0..2, as a dict."""
    return json.loads(_evaluate_json(list(y_true), list(y_pred)))
