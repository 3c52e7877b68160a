"""Regenerate src/script/table.rs from the Unicode character database.

Each row holds one identity label per offset in a 128-codepoint block. Labels
are character names with the script prefix removed; Devanagari vowel names
are rewritten to the Dravidian long/short convention so that, e.g.,
DEVANAGARI LETTER SHORT E and KANNADA LETTER E share a label.

Python's bundled database may lag the current Unicode release; assignments
newer than it are listed in LATE_ASSIGNMENTS.
"""
import sys
import unicodedata

LATE_ASSIGNMENTS = {
    0x0C3C: "TELUGU SIGN NUKTA",
    0x0C5D: "TELUGU LETTER NAKAARA POLLU",
    0x0CDD: "KANNADA LETTER NAKAARA POLLU",
    0x0CF3: "KANNADA SIGN COMBINING ANUSVARA ABOVE RIGHT",
}

SCRIPTS = [
    ("DEVANAGARI", 0x0900),
    ("TAMIL", 0x0B80),
    ("TELUGU", 0x0C00),
    ("KANNADA", 0x0C80),
    ("MALAYALAM", 0x0D00),
]

DEVANAGARI_VOWELS = {
    "LETTER SHORT E": "LETTER E",
    "LETTER E": "LETTER EE",
    "LETTER SHORT O": "LETTER O",
    "LETTER O": "LETTER OO",
    "VOWEL SIGN SHORT E": "VOWEL SIGN E",
    "VOWEL SIGN E": "VOWEL SIGN EE",
    "VOWEL SIGN SHORT O": "VOWEL SIGN O",
    "VOWEL SIGN O": "VOWEL SIGN OO",
}


def name(cp):
    return LATE_ASSIGNMENTS.get(cp) or unicodedata.name(chr(cp), None)


def label(script, base, offset):
    n = name(base + offset)
    if n is None:
        return ""
    n = n.replace(script + " ", "", 1)
    if script == "DEVANAGARI":
        n = DEVANAGARI_VOWELS.get(n, n)
    return n


def rows():
    return {s: [label(s, b, o) for o in range(128)] for s, b in SCRIPTS}


if __name__ == "__main__":
    out = sys.stdout
    out.write("// Generated by tools/gen_script_table.py. Do not edit.\n\n")
    for script, _ in SCRIPTS:
        labels = rows()[script]
        out.write(f"pub(super) const {script}: [&str; 128] = [\n")
        for o, l in enumerate(labels):
            out.write(f'    "{l}", // {o:#04x}\n')
        out.write("];\n\n")
