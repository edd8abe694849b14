"""Tokenization, n-gram vocabularies, fold plans and positive subsampling"""

from src.corpus.tokenizer import tokenize
from src.corpus.vocab import ngram_vocab, ngrams
from src.corpus.folds import stratified_folds, subsample_positives

__all__ = [
    'tokenize',
    'ngram_vocab',
    'ngrams',
    'stratified_folds',
    'subsample_positives',
]
