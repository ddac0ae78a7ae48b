"""termlex: build a specialized lexicon from bibliographic titles.

Pipeline stages: ingest references -> deduplicate -> keep English titles ->
POS-tag -> extract candidate terms with syntactic patterns -> rank with a
combined C-value / TF-IDF score -> sample terms for multi-rater annotation ->
measure agreement (Fleiss kappa) and ranking quality (precision@k) ->
derive and export the validated lexicon.
"""

__version__ = "0.1.0"
