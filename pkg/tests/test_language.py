from gpx_harvest.language import detect_language, profile_languages


def test_profiles_cover_a_wide_language_set():
    languages = profile_languages()
    assert len(languages) >= 11
    for code in ("en", "fr", "de", "it", "es", "nl"):
        assert code in languages
    assert all(code == code.lower() and len(code) == 2 for code in languages)


def test_detects_german():
    text = ("Der Weg ist sehr gut markiert und beginnt an der alten Kirche im Dorf. "
            "Schöne Aussicht über das ganze Tal.")
    assert detect_language(text) == "de"


def test_detects_english():
    text = "Quieter roads and backstreets, quirky interest but still direct."
    assert detect_language(text) == "en"


def test_detects_french():
    text = ("Belle boucle au départ du village, montée régulière jusqu'au col puis "
            "descente tranquille par la forêt.")
    assert detect_language(text) == "fr"


def test_detects_italian_and_spanish():
    assert detect_language("Bellissima vista dalla cima, sentiero facile da seguire "
                           "e ben segnalato per tutta la salita.") == "it"
    assert detect_language("Vistas preciosas desde la cima, sendero fácil de seguir "
                           "y bien señalizado durante toda la subida.") == "es"


def test_numeric_noise_is_unknown():
    assert detect_language("12345 67890 !!!") == "unknown"


def test_mostly_digits_is_unknown():
    assert detect_language("47.2531 11.3898 47.2540 11.3910 47.2552") == "unknown"


def test_short_text_is_unknown():
    assert detect_language("ok") == "unknown"
    assert detect_language("") == "unknown"


def test_consonant_soup_is_unknown():
    assert detect_language("zzkw qqpt xxvr mmjq bbfd ggxx") == "unknown"


def test_detector_is_deterministic():
    text = "Mooie wandeling door het bos en langs de rivier naar het uitzichtpunt."
    assert detect_language(text) == detect_language(text) == "nl"


def test_masked_tokens_do_not_break_detection():
    text = ("Meet at the car park by the bridge. More details at <URL> or send a "
            "note to <EMAIL>. Lovely views along the whole ridge on a clear day.")
    assert detect_language(text) == "en"
