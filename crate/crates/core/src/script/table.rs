// Generated by tools/gen_script_table.py. Do not edit.

pub(super) const DEVANAGARI: [&str; 128] = [
    "SIGN INVERTED CANDRABINDU", // 0x00
    "SIGN CANDRABINDU", // 0x01
    "SIGN ANUSVARA", // 0x02
    "SIGN VISARGA", // 0x03
    "LETTER SHORT A", // 0x04
    "LETTER A", // 0x05
    "LETTER AA", // 0x06
    "LETTER I", // 0x07
    "LETTER II", // 0x08
    "LETTER U", // 0x09
    "LETTER UU", // 0x0a
    "LETTER VOCALIC R", // 0x0b
    "LETTER VOCALIC L", // 0x0c
    "LETTER CANDRA E", // 0x0d
    "LETTER E", // 0x0e
    "LETTER EE", // 0x0f
    "LETTER AI", // 0x10
    "LETTER CANDRA O", // 0x11
    "LETTER O", // 0x12
    "LETTER OO", // 0x13
    "LETTER AU", // 0x14
    "LETTER KA", // 0x15
    "LETTER KHA", // 0x16
    "LETTER GA", // 0x17
    "LETTER GHA", // 0x18
    "LETTER NGA", // 0x19
    "LETTER CA", // 0x1a
    "LETTER CHA", // 0x1b
    "LETTER JA", // 0x1c
    "LETTER JHA", // 0x1d
    "LETTER NYA", // 0x1e
    "LETTER TTA", // 0x1f
    "LETTER TTHA", // 0x20
    "LETTER DDA", // 0x21
    "LETTER DDHA", // 0x22
    "LETTER NNA", // 0x23
    "LETTER TA", // 0x24
    "LETTER THA", // 0x25
    "LETTER DA", // 0x26
    "LETTER DHA", // 0x27
    "LETTER NA", // 0x28
    "LETTER NNNA", // 0x29
    "LETTER PA", // 0x2a
    "LETTER PHA", // 0x2b
    "LETTER BA", // 0x2c
    "LETTER BHA", // 0x2d
    "LETTER MA", // 0x2e
    "LETTER YA", // 0x2f
    "LETTER RA", // 0x30
    "LETTER RRA", // 0x31
    "LETTER LA", // 0x32
    "LETTER LLA", // 0x33
    "LETTER LLLA", // 0x34
    "LETTER VA", // 0x35
    "LETTER SHA", // 0x36
    "LETTER SSA", // 0x37
    "LETTER SA", // 0x38
    "LETTER HA", // 0x39
    "VOWEL SIGN OE", // 0x3a
    "VOWEL SIGN OOE", // 0x3b
    "SIGN NUKTA", // 0x3c
    "SIGN AVAGRAHA", // 0x3d
    "VOWEL SIGN AA", // 0x3e
    "VOWEL SIGN I", // 0x3f
    "VOWEL SIGN II", // 0x40
    "VOWEL SIGN U", // 0x41
    "VOWEL SIGN UU", // 0x42
    "VOWEL SIGN VOCALIC R", // 0x43
    "VOWEL SIGN VOCALIC RR", // 0x44
    "VOWEL SIGN CANDRA E", // 0x45
    "VOWEL SIGN E", // 0x46
    "VOWEL SIGN EE", // 0x47
    "VOWEL SIGN AI", // 0x48
    "VOWEL SIGN CANDRA O", // 0x49
    "VOWEL SIGN O", // 0x4a
    "VOWEL SIGN OO", // 0x4b
    "VOWEL SIGN AU", // 0x4c
    "SIGN VIRAMA", // 0x4d
    "VOWEL SIGN PRISHTHAMATRA E", // 0x4e
    "VOWEL SIGN AW", // 0x4f
    "OM", // 0x50
    "STRESS SIGN UDATTA", // 0x51
    "STRESS SIGN ANUDATTA", // 0x52
    "GRAVE ACCENT", // 0x53
    "ACUTE ACCENT", // 0x54
    "VOWEL SIGN CANDRA LONG E", // 0x55
    "VOWEL SIGN UE", // 0x56
    "VOWEL SIGN UUE", // 0x57
    "LETTER QA", // 0x58
    "LETTER KHHA", // 0x59
    "LETTER GHHA", // 0x5a
    "LETTER ZA", // 0x5b
    "LETTER DDDHA", // 0x5c
    "LETTER RHA", // 0x5d
    "LETTER FA", // 0x5e
    "LETTER YYA", // 0x5f
    "LETTER VOCALIC RR", // 0x60
    "LETTER VOCALIC LL", // 0x61
    "VOWEL SIGN VOCALIC L", // 0x62
    "VOWEL SIGN VOCALIC LL", // 0x63
    "DANDA", // 0x64
    "DOUBLE DANDA", // 0x65
    "DIGIT ZERO", // 0x66
    "DIGIT ONE", // 0x67
    "DIGIT TWO", // 0x68
    "DIGIT THREE", // 0x69
    "DIGIT FOUR", // 0x6a
    "DIGIT FIVE", // 0x6b
    "DIGIT SIX", // 0x6c
    "DIGIT SEVEN", // 0x6d
    "DIGIT EIGHT", // 0x6e
    "DIGIT NINE", // 0x6f
    "ABBREVIATION SIGN", // 0x70
    "SIGN HIGH SPACING DOT", // 0x71
    "LETTER CANDRA A", // 0x72
    "LETTER OE", // 0x73
    "LETTER OOE", // 0x74
    "LETTER AW", // 0x75
    "LETTER UE", // 0x76
    "LETTER UUE", // 0x77
    "LETTER MARWARI DDA", // 0x78
    "LETTER ZHA", // 0x79
    "LETTER HEAVY YA", // 0x7a
    "LETTER GGA", // 0x7b
    "LETTER JJA", // 0x7c
    "LETTER GLOTTAL STOP", // 0x7d
    "LETTER DDDA", // 0x7e
    "LETTER BBA", // 0x7f
];

pub(super) const TAMIL: [&str; 128] = [
    "", // 0x00
    "", // 0x01
    "SIGN ANUSVARA", // 0x02
    "SIGN VISARGA", // 0x03
    "", // 0x04
    "LETTER A", // 0x05
    "LETTER AA", // 0x06
    "LETTER I", // 0x07
    "LETTER II", // 0x08
    "LETTER U", // 0x09
    "LETTER UU", // 0x0a
    "", // 0x0b
    "", // 0x0c
    "", // 0x0d
    "LETTER E", // 0x0e
    "LETTER EE", // 0x0f
    "LETTER AI", // 0x10
    "", // 0x11
    "LETTER O", // 0x12
    "LETTER OO", // 0x13
    "LETTER AU", // 0x14
    "LETTER KA", // 0x15
    "", // 0x16
    "", // 0x17
    "", // 0x18
    "LETTER NGA", // 0x19
    "LETTER CA", // 0x1a
    "", // 0x1b
    "LETTER JA", // 0x1c
    "", // 0x1d
    "LETTER NYA", // 0x1e
    "LETTER TTA", // 0x1f
    "", // 0x20
    "", // 0x21
    "", // 0x22
    "LETTER NNA", // 0x23
    "LETTER TA", // 0x24
    "", // 0x25
    "", // 0x26
    "", // 0x27
    "LETTER NA", // 0x28
    "LETTER NNNA", // 0x29
    "LETTER PA", // 0x2a
    "", // 0x2b
    "", // 0x2c
    "", // 0x2d
    "LETTER MA", // 0x2e
    "LETTER YA", // 0x2f
    "LETTER RA", // 0x30
    "LETTER RRA", // 0x31
    "LETTER LA", // 0x32
    "LETTER LLA", // 0x33
    "LETTER LLLA", // 0x34
    "LETTER VA", // 0x35
    "LETTER SHA", // 0x36
    "LETTER SSA", // 0x37
    "LETTER SA", // 0x38
    "LETTER HA", // 0x39
    "", // 0x3a
    "", // 0x3b
    "", // 0x3c
    "", // 0x3d
    "VOWEL SIGN AA", // 0x3e
    "VOWEL SIGN I", // 0x3f
    "VOWEL SIGN II", // 0x40
    "VOWEL SIGN U", // 0x41
    "VOWEL SIGN UU", // 0x42
    "", // 0x43
    "", // 0x44
    "", // 0x45
    "VOWEL SIGN E", // 0x46
    "VOWEL SIGN EE", // 0x47
    "VOWEL SIGN AI", // 0x48
    "", // 0x49
    "VOWEL SIGN O", // 0x4a
    "VOWEL SIGN OO", // 0x4b
    "VOWEL SIGN AU", // 0x4c
    "SIGN VIRAMA", // 0x4d
    "", // 0x4e
    "", // 0x4f
    "OM", // 0x50
    "", // 0x51
    "", // 0x52
    "", // 0x53
    "", // 0x54
    "", // 0x55
    "", // 0x56
    "AU LENGTH MARK", // 0x57
    "", // 0x58
    "", // 0x59
    "", // 0x5a
    "", // 0x5b
    "", // 0x5c
    "", // 0x5d
    "", // 0x5e
    "", // 0x5f
    "", // 0x60
    "", // 0x61
    "", // 0x62
    "", // 0x63
    "", // 0x64
    "", // 0x65
    "DIGIT ZERO", // 0x66
    "DIGIT ONE", // 0x67
    "DIGIT TWO", // 0x68
    "DIGIT THREE", // 0x69
    "DIGIT FOUR", // 0x6a
    "DIGIT FIVE", // 0x6b
    "DIGIT SIX", // 0x6c
    "DIGIT SEVEN", // 0x6d
    "DIGIT EIGHT", // 0x6e
    "DIGIT NINE", // 0x6f
    "NUMBER TEN", // 0x70
    "NUMBER ONE HUNDRED", // 0x71
    "NUMBER ONE THOUSAND", // 0x72
    "DAY SIGN", // 0x73
    "MONTH SIGN", // 0x74
    "YEAR SIGN", // 0x75
    "DEBIT SIGN", // 0x76
    "CREDIT SIGN", // 0x77
    "AS ABOVE SIGN", // 0x78
    "RUPEE SIGN", // 0x79
    "NUMBER SIGN", // 0x7a
    "", // 0x7b
    "", // 0x7c
    "", // 0x7d
    "", // 0x7e
    "", // 0x7f
];

pub(super) const TELUGU: [&str; 128] = [
    "SIGN COMBINING CANDRABINDU ABOVE", // 0x00
    "SIGN CANDRABINDU", // 0x01
    "SIGN ANUSVARA", // 0x02
    "SIGN VISARGA", // 0x03
    "SIGN COMBINING ANUSVARA ABOVE", // 0x04
    "LETTER A", // 0x05
    "LETTER AA", // 0x06
    "LETTER I", // 0x07
    "LETTER II", // 0x08
    "LETTER U", // 0x09
    "LETTER UU", // 0x0a
    "LETTER VOCALIC R", // 0x0b
    "LETTER VOCALIC L", // 0x0c
    "", // 0x0d
    "LETTER E", // 0x0e
    "LETTER EE", // 0x0f
    "LETTER AI", // 0x10
    "", // 0x11
    "LETTER O", // 0x12
    "LETTER OO", // 0x13
    "LETTER AU", // 0x14
    "LETTER KA", // 0x15
    "LETTER KHA", // 0x16
    "LETTER GA", // 0x17
    "LETTER GHA", // 0x18
    "LETTER NGA", // 0x19
    "LETTER CA", // 0x1a
    "LETTER CHA", // 0x1b
    "LETTER JA", // 0x1c
    "LETTER JHA", // 0x1d
    "LETTER NYA", // 0x1e
    "LETTER TTA", // 0x1f
    "LETTER TTHA", // 0x20
    "LETTER DDA", // 0x21
    "LETTER DDHA", // 0x22
    "LETTER NNA", // 0x23
    "LETTER TA", // 0x24
    "LETTER THA", // 0x25
    "LETTER DA", // 0x26
    "LETTER DHA", // 0x27
    "LETTER NA", // 0x28
    "", // 0x29
    "LETTER PA", // 0x2a
    "LETTER PHA", // 0x2b
    "LETTER BA", // 0x2c
    "LETTER BHA", // 0x2d
    "LETTER MA", // 0x2e
    "LETTER YA", // 0x2f
    "LETTER RA", // 0x30
    "LETTER RRA", // 0x31
    "LETTER LA", // 0x32
    "LETTER LLA", // 0x33
    "LETTER LLLA", // 0x34
    "LETTER VA", // 0x35
    "LETTER SHA", // 0x36
    "LETTER SSA", // 0x37
    "LETTER SA", // 0x38
    "LETTER HA", // 0x39
    "", // 0x3a
    "", // 0x3b
    "SIGN NUKTA", // 0x3c
    "SIGN AVAGRAHA", // 0x3d
    "VOWEL SIGN AA", // 0x3e
    "VOWEL SIGN I", // 0x3f
    "VOWEL SIGN II", // 0x40
    "VOWEL SIGN U", // 0x41
    "VOWEL SIGN UU", // 0x42
    "VOWEL SIGN VOCALIC R", // 0x43
    "VOWEL SIGN VOCALIC RR", // 0x44
    "", // 0x45
    "VOWEL SIGN E", // 0x46
    "VOWEL SIGN EE", // 0x47
    "VOWEL SIGN AI", // 0x48
    "", // 0x49
    "VOWEL SIGN O", // 0x4a
    "VOWEL SIGN OO", // 0x4b
    "VOWEL SIGN AU", // 0x4c
    "SIGN VIRAMA", // 0x4d
    "", // 0x4e
    "", // 0x4f
    "", // 0x50
    "", // 0x51
    "", // 0x52
    "", // 0x53
    "", // 0x54
    "LENGTH MARK", // 0x55
    "AI LENGTH MARK", // 0x56
    "", // 0x57
    "LETTER TSA", // 0x58
    "LETTER DZA", // 0x59
    "LETTER RRRA", // 0x5a
    "", // 0x5b
    "", // 0x5c
    "LETTER NAKAARA POLLU", // 0x5d
    "", // 0x5e
    "", // 0x5f
    "LETTER VOCALIC RR", // 0x60
    "LETTER VOCALIC LL", // 0x61
    "VOWEL SIGN VOCALIC L", // 0x62
    "VOWEL SIGN VOCALIC LL", // 0x63
    "", // 0x64
    "", // 0x65
    "DIGIT ZERO", // 0x66
    "DIGIT ONE", // 0x67
    "DIGIT TWO", // 0x68
    "DIGIT THREE", // 0x69
    "DIGIT FOUR", // 0x6a
    "DIGIT FIVE", // 0x6b
    "DIGIT SIX", // 0x6c
    "DIGIT SEVEN", // 0x6d
    "DIGIT EIGHT", // 0x6e
    "DIGIT NINE", // 0x6f
    "", // 0x70
    "", // 0x71
    "", // 0x72
    "", // 0x73
    "", // 0x74
    "", // 0x75
    "", // 0x76
    "SIGN SIDDHAM", // 0x77
    "FRACTION DIGIT ZERO FOR ODD POWERS OF FOUR", // 0x78
    "FRACTION DIGIT ONE FOR ODD POWERS OF FOUR", // 0x79
    "FRACTION DIGIT TWO FOR ODD POWERS OF FOUR", // 0x7a
    "FRACTION DIGIT THREE FOR ODD POWERS OF FOUR", // 0x7b
    "FRACTION DIGIT ONE FOR EVEN POWERS OF FOUR", // 0x7c
    "FRACTION DIGIT TWO FOR EVEN POWERS OF FOUR", // 0x7d
    "FRACTION DIGIT THREE FOR EVEN POWERS OF FOUR", // 0x7e
    "SIGN TUUMU", // 0x7f
];

pub(super) const KANNADA: [&str; 128] = [
    "SIGN SPACING CANDRABINDU", // 0x00
    "SIGN CANDRABINDU", // 0x01
    "SIGN ANUSVARA", // 0x02
    "SIGN VISARGA", // 0x03
    "SIGN SIDDHAM", // 0x04
    "LETTER A", // 0x05
    "LETTER AA", // 0x06
    "LETTER I", // 0x07
    "LETTER II", // 0x08
    "LETTER U", // 0x09
    "LETTER UU", // 0x0a
    "LETTER VOCALIC R", // 0x0b
    "LETTER VOCALIC L", // 0x0c
    "", // 0x0d
    "LETTER E", // 0x0e
    "LETTER EE", // 0x0f
    "LETTER AI", // 0x10
    "", // 0x11
    "LETTER O", // 0x12
    "LETTER OO", // 0x13
    "LETTER AU", // 0x14
    "LETTER KA", // 0x15
    "LETTER KHA", // 0x16
    "LETTER GA", // 0x17
    "LETTER GHA", // 0x18
    "LETTER NGA", // 0x19
    "LETTER CA", // 0x1a
    "LETTER CHA", // 0x1b
    "LETTER JA", // 0x1c
    "LETTER JHA", // 0x1d
    "LETTER NYA", // 0x1e
    "LETTER TTA", // 0x1f
    "LETTER TTHA", // 0x20
    "LETTER DDA", // 0x21
    "LETTER DDHA", // 0x22
    "LETTER NNA", // 0x23
    "LETTER TA", // 0x24
    "LETTER THA", // 0x25
    "LETTER DA", // 0x26
    "LETTER DHA", // 0x27
    "LETTER NA", // 0x28
    "", // 0x29
    "LETTER PA", // 0x2a
    "LETTER PHA", // 0x2b
    "LETTER BA", // 0x2c
    "LETTER BHA", // 0x2d
    "LETTER MA", // 0x2e
    "LETTER YA", // 0x2f
    "LETTER RA", // 0x30
    "LETTER RRA", // 0x31
    "LETTER LA", // 0x32
    "LETTER LLA", // 0x33
    "", // 0x34
    "LETTER VA", // 0x35
    "LETTER SHA", // 0x36
    "LETTER SSA", // 0x37
    "LETTER SA", // 0x38
    "LETTER HA", // 0x39
    "", // 0x3a
    "", // 0x3b
    "SIGN NUKTA", // 0x3c
    "SIGN AVAGRAHA", // 0x3d
    "VOWEL SIGN AA", // 0x3e
    "VOWEL SIGN I", // 0x3f
    "VOWEL SIGN II", // 0x40
    "VOWEL SIGN U", // 0x41
    "VOWEL SIGN UU", // 0x42
    "VOWEL SIGN VOCALIC R", // 0x43
    "VOWEL SIGN VOCALIC RR", // 0x44
    "", // 0x45
    "VOWEL SIGN E", // 0x46
    "VOWEL SIGN EE", // 0x47
    "VOWEL SIGN AI", // 0x48
    "", // 0x49
    "VOWEL SIGN O", // 0x4a
    "VOWEL SIGN OO", // 0x4b
    "VOWEL SIGN AU", // 0x4c
    "SIGN VIRAMA", // 0x4d
    "", // 0x4e
    "", // 0x4f
    "", // 0x50
    "", // 0x51
    "", // 0x52
    "", // 0x53
    "", // 0x54
    "LENGTH MARK", // 0x55
    "AI LENGTH MARK", // 0x56
    "", // 0x57
    "", // 0x58
    "", // 0x59
    "", // 0x5a
    "", // 0x5b
    "", // 0x5c
    "LETTER NAKAARA POLLU", // 0x5d
    "LETTER FA", // 0x5e
    "", // 0x5f
    "LETTER VOCALIC RR", // 0x60
    "LETTER VOCALIC LL", // 0x61
    "VOWEL SIGN VOCALIC L", // 0x62
    "VOWEL SIGN VOCALIC LL", // 0x63
    "", // 0x64
    "", // 0x65
    "DIGIT ZERO", // 0x66
    "DIGIT ONE", // 0x67
    "DIGIT TWO", // 0x68
    "DIGIT THREE", // 0x69
    "DIGIT FOUR", // 0x6a
    "DIGIT FIVE", // 0x6b
    "DIGIT SIX", // 0x6c
    "DIGIT SEVEN", // 0x6d
    "DIGIT EIGHT", // 0x6e
    "DIGIT NINE", // 0x6f
    "", // 0x70
    "SIGN JIHVAMULIYA", // 0x71
    "SIGN UPADHMANIYA", // 0x72
    "SIGN COMBINING ANUSVARA ABOVE RIGHT", // 0x73
    "", // 0x74
    "", // 0x75
    "", // 0x76
    "", // 0x77
    "", // 0x78
    "", // 0x79
    "", // 0x7a
    "", // 0x7b
    "", // 0x7c
    "", // 0x7d
    "", // 0x7e
    "", // 0x7f
];

pub(super) const MALAYALAM: [&str; 128] = [
    "SIGN COMBINING ANUSVARA ABOVE", // 0x00
    "SIGN CANDRABINDU", // 0x01
    "SIGN ANUSVARA", // 0x02
    "SIGN VISARGA", // 0x03
    "LETTER VEDIC ANUSVARA", // 0x04
    "LETTER A", // 0x05
    "LETTER AA", // 0x06
    "LETTER I", // 0x07
    "LETTER II", // 0x08
    "LETTER U", // 0x09
    "LETTER UU", // 0x0a
    "LETTER VOCALIC R", // 0x0b
    "LETTER VOCALIC L", // 0x0c
    "", // 0x0d
    "LETTER E", // 0x0e
    "LETTER EE", // 0x0f
    "LETTER AI", // 0x10
    "", // 0x11
    "LETTER O", // 0x12
    "LETTER OO", // 0x13
    "LETTER AU", // 0x14
    "LETTER KA", // 0x15
    "LETTER KHA", // 0x16
    "LETTER GA", // 0x17
    "LETTER GHA", // 0x18
    "LETTER NGA", // 0x19
    "LETTER CA", // 0x1a
    "LETTER CHA", // 0x1b
    "LETTER JA", // 0x1c
    "LETTER JHA", // 0x1d
    "LETTER NYA", // 0x1e
    "LETTER TTA", // 0x1f
    "LETTER TTHA", // 0x20
    "LETTER DDA", // 0x21
    "LETTER DDHA", // 0x22
    "LETTER NNA", // 0x23
    "LETTER TA", // 0x24
    "LETTER THA", // 0x25
    "LETTER DA", // 0x26
    "LETTER DHA", // 0x27
    "LETTER NA", // 0x28
    "LETTER NNNA", // 0x29
    "LETTER PA", // 0x2a
    "LETTER PHA", // 0x2b
    "LETTER BA", // 0x2c
    "LETTER BHA", // 0x2d
    "LETTER MA", // 0x2e
    "LETTER YA", // 0x2f
    "LETTER RA", // 0x30
    "LETTER RRA", // 0x31
    "LETTER LA", // 0x32
    "LETTER LLA", // 0x33
    "LETTER LLLA", // 0x34
    "LETTER VA", // 0x35
    "LETTER SHA", // 0x36
    "LETTER SSA", // 0x37
    "LETTER SA", // 0x38
    "LETTER HA", // 0x39
    "LETTER TTTA", // 0x3a
    "SIGN VERTICAL BAR VIRAMA", // 0x3b
    "SIGN CIRCULAR VIRAMA", // 0x3c
    "SIGN AVAGRAHA", // 0x3d
    "VOWEL SIGN AA", // 0x3e
    "VOWEL SIGN I", // 0x3f
    "VOWEL SIGN II", // 0x40
    "VOWEL SIGN U", // 0x41
    "VOWEL SIGN UU", // 0x42
    "VOWEL SIGN VOCALIC R", // 0x43
    "VOWEL SIGN VOCALIC RR", // 0x44
    "", // 0x45
    "VOWEL SIGN E", // 0x46
    "VOWEL SIGN EE", // 0x47
    "VOWEL SIGN AI", // 0x48
    "", // 0x49
    "VOWEL SIGN O", // 0x4a
    "VOWEL SIGN OO", // 0x4b
    "VOWEL SIGN AU", // 0x4c
    "SIGN VIRAMA", // 0x4d
    "LETTER DOT REPH", // 0x4e
    "SIGN PARA", // 0x4f
    "", // 0x50
    "", // 0x51
    "", // 0x52
    "", // 0x53
    "LETTER CHILLU M", // 0x54
    "LETTER CHILLU Y", // 0x55
    "LETTER CHILLU LLL", // 0x56
    "AU LENGTH MARK", // 0x57
    "FRACTION ONE ONE-HUNDRED-AND-SIXTIETH", // 0x58
    "FRACTION ONE FORTIETH", // 0x59
    "FRACTION THREE EIGHTIETHS", // 0x5a
    "FRACTION ONE TWENTIETH", // 0x5b
    "FRACTION ONE TENTH", // 0x5c
    "FRACTION THREE TWENTIETHS", // 0x5d
    "FRACTION ONE FIFTH", // 0x5e
    "LETTER ARCHAIC II", // 0x5f
    "LETTER VOCALIC RR", // 0x60
    "LETTER VOCALIC LL", // 0x61
    "VOWEL SIGN VOCALIC L", // 0x62
    "VOWEL SIGN VOCALIC LL", // 0x63
    "", // 0x64
    "", // 0x65
    "DIGIT ZERO", // 0x66
    "DIGIT ONE", // 0x67
    "DIGIT TWO", // 0x68
    "DIGIT THREE", // 0x69
    "DIGIT FOUR", // 0x6a
    "DIGIT FIVE", // 0x6b
    "DIGIT SIX", // 0x6c
    "DIGIT SEVEN", // 0x6d
    "DIGIT EIGHT", // 0x6e
    "DIGIT NINE", // 0x6f
    "NUMBER TEN", // 0x70
    "NUMBER ONE HUNDRED", // 0x71
    "NUMBER ONE THOUSAND", // 0x72
    "FRACTION ONE QUARTER", // 0x73
    "FRACTION ONE HALF", // 0x74
    "FRACTION THREE QUARTERS", // 0x75
    "FRACTION ONE SIXTEENTH", // 0x76
    "FRACTION ONE EIGHTH", // 0x77
    "FRACTION THREE SIXTEENTHS", // 0x78
    "DATE MARK", // 0x79
    "LETTER CHILLU NN", // 0x7a
    "LETTER CHILLU N", // 0x7b
    "LETTER CHILLU RR", // 0x7c
    "LETTER CHILLU L", // 0x7d
    "LETTER CHILLU LL", // 0x7e
    "LETTER CHILLU K", // 0x7f
];

