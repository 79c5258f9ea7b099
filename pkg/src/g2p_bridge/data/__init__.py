"""Bundled data files: default alphabet, homograph lexicon, toy corpus."""
