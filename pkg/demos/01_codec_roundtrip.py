"""Walk through the intermediate alphabet: validation, romanization
cleanup, and the lossless string <-> phoneme conversion.

Run: python demos/01_codec_roundtrip.py
"""

from g2p_bridge.codec import (
    IntermediateAlphabet,
    canonicalize,
    default_alphabet,
    from_phonemes,
    normalize_persian,
    to_phonemes,
    validate_alphabet,
)

table = default_alphabet()
print("alphabet entries:", len(table.phoneme_to_char))
print("rewrite rules:", len(table.digraph_rules))
print()

# The validator enforces the structural constraints. A table reusing 'x'
# (which has no Persian phoneme) is rejected with a named violation.
bad = IntermediateAlphabet({"mystery": "x", "vowel": "a"})
for violation in validate_alphabet(bad).violations:
    print("rejected table:", violation.code, "-", violation.message)
print()

# Conventional romanizations collapse to the canonical one-char-per-phoneme
# form. "khaab" (sleep) becomes the compact "ķAb".
for raw in ["khaab", "shab", "salaam khoob", "chaai"]:
    print(f"canonicalize({raw!r}) = {canonicalize(raw, table)!r}")
print()

# Persian input gets unified first (Arabic kaf/yeh variants, digits, spacing).
messy = "كتاب  يک"
print(f"normalize_persian({messy!r}) = {normalize_persian(messy)!r}")
print()

# Because every phoneme is exactly one character, conversion is bijective.
sentence = "ķAbe ķoš"
seq = to_phonemes(sentence, table)
print(f"{sentence!r} ->")
for token in seq:
    print("   ", token)
print("back:", from_phonemes(seq, table))
assert from_phonemes(seq, table) == sentence
