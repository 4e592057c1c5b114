"""Synthetic Polish-like corpora for tests and demonstrations.

The real historical/contemporary edition pairs are not redistributable, so
these generators build a contemporary lexicon from productive stems and
endings, compose paragraphs from it, and "age" them with the inverse of a
ruleset.  Everything is driven by an explicit seed.
"""
from __future__ import annotations

import random
from pathlib import Path

from .aligner import ParagraphPair
from .corpus import CONTEMPORARY, HISTORICAL
from .io import atomic_write, jsonl
from .reverse import VariantGenerator, invert_ruleset, segments
from .rules import RuleSet, default_ruleset, normalize_word

# stems taking -cja/-zja/-sja style endings (decyzja, lekcja, wizja)
J_STEMS = """decyz akc lekc kolekc egzystenc konstytuc instytuc pozyc tradyc rewoluc
telewiz wiz pens emis mis pas ses rac stac opc funkc frakc relac sytuac
inflac inwaz eksploz ilustrac organizac informac kombinac lokac edukac
mot inteligenc konferenc komisj propozyc kondyc ambic amunic dykc
koalic erudyc ekspozyc fikc dyrekc sekc redakc produkc konstrukc dedukc
indukc intuic aukc prowizj rewiz precyz dywiz fuz iluz konkluz eroz""".split()
# stems taking -ia endings (teoria, historia, chemia)
I_STEMS = """teor histor chem geolog biolog ekonom filozof akadem harmon melod energ
kateg ideolog mitolog analog strateg metodolog ironi symetr galer kolon
lin serwi aur kompan parod rapsod agon ceremon terapi alerg nostalg fobi
mag trag komed kanal sfer atmosfer ortograf fotograf biograf geograf
bibliograf stenograf demograf litur synagog pedagog psycholog socjolog""".split()
I_STEMS = [s.rstrip("i") for s in I_STEMS]
J_ENDINGS = ["ja", "ji", "ję", "ją", "je", "jom", "jami", "jach"]
I_ENDINGS = ["ia", "ii", "ię", "ią", "ie", "iom", "iami", "iach"]
ADJ_STEMS = """dobr now star młod mał pełn cał wesoł smutn cich głośn jasn ciemn
ciepł zimn mokr such ład brzydk wysok nisk krótk dług szerok wąsk głęb
płytk prost krzyw okrągł ostr tęp mądr głup pilniejsz spokojn groźn
bogat biedn zdrow chor sprytn słab piękn czyst brudn śwież tward miękk
ciężk lekk grub cienk gęst rzadk słodk gorzk kwaśn słon pust bliższ
pamiętn wiern uczciw odważn leniw pracowit radosn ponur wczesn późn
rann wieczorn nocn dzienn letn jesienn zimow wiosenn miejsk wiejsk leśn
poln morsk górsk rzeczn polsk ruski niemieck francusk angielsk włosk""".split()
ADJ_ENDINGS = ["y", "a", "e", "ego", "ej", "emu", "ym", "ymi", "ych"]
PARTICIPLE_STEMS = """kochaj śpiewaj czytaj pisz myśl mówi robi widz słysz biegn płyn
rosn leż siedz stoj chodz jedz wraca sprzedaj kupuj pracuj malu
budu maluj obiecuj opisuj""".split()
PARTICIPLE_ENDINGS = ["ącym", "ące", "ąca", "ącej", "ącego"]
OWAN_STEMS = """mal bud kup prac obiec opis zapis malow zbud otrzym""".split()
ISK_WORDS = """blisko bliski bliska bliskie bliskość pisk piski iskra iskry
śliski śliska ślisko uścisk uściski zysk zyski nacisk nacisku""".split()
ANTY_STEMS = """teza patia ciało kwariat biotyk semita faszysta lopa wirus
klerykalny komunista bohater typ rakieta""".split()
FUNCTION_WORDS = """i w na nie się że to z do jak ale tak po przy od za o a lub
czy już jeszcze tylko bardzo kiedy gdzie który która które jego jej ich
był była było byli mieli miał miała ma mają jest są będzie tam tu teraz
potem wtedy zawsze nigdy nawet dla przez pod nad przed między bez czym
pewno jednak więc również także ten ta te tego tej tym ktoś coś nic""".split()
PREFIXES = ["", "nie", "prze", "przy", "naj", "pół", "arcy", "nad", "pod", "przed",
            "za", "wy", "roz", "bez", "współ", "nad"]
AUTHOR_NAMES = """Adam Bolesław Eliza Henryk Józef Maria Stefan Władysław Zofia Gabriela
Kraszewski Prus Orzeszkowa Sienkiewicz Reymont Żeromski Dąbrowska Nałkowska
Rodziewiczówna Zapolska Weyssenhoff Berent Sieroszewski Kaden""".split()
PHRASES = ["nie ma", "na pewno", "po czym", "przy czym", "generał"]


def _base_words(prefixed=True):
    out = []
    out += [s + e for s in J_STEMS for e in J_ENDINGS]
    out += [s + e for s in I_STEMS for e in I_ENDINGS]
    prefixes = PREFIXES if prefixed else [""]
    out += [p + s + e for p in prefixes for s in ADJ_STEMS for e in ADJ_ENDINGS]
    out += [s[:-1] + e if s.endswith("j") else s + e
            for s in PARTICIPLE_STEMS for e in PARTICIPLE_ENDINGS]
    out += [s + "owan" + e for s in OWAN_STEMS for e in ("ym", "y", "a", "ego", "ymi")]
    out += ISK_WORDS + ["anty" + s for s in ANTY_STEMS] + FUNCTION_WORDS
    return list(dict.fromkeys(out))


def contemporary_lexicon(size: int = 10_000, seed: int = 0,
                         ruleset: RuleSet | None = None, prefixed: bool = True) -> list[str]:
    """A seeded sample of contemporary-looking words the ruleset leaves unchanged.

    ``prefixed=False`` leaves out the prefixed adjective forms, which keeps
    running text from sharing unnaturally many character trigrams.
    """
    ruleset = ruleset or default_ruleset()
    pool = [w for w in _base_words(prefixed) if normalize_word(w, ruleset) == w]
    if size > len(pool):
        raise ValueError(f"only {len(pool)} lexicon words available")
    rng = random.Random(seed)
    return sorted(rng.sample(pool, size))


def make_paragraph(rng: random.Random, lexicon, sentences=(1, 4), length=(5, 14),
                   phrase_rate=0.15, function_rate=0.3) -> str:
    out = []
    for _ in range(rng.randint(*sentences)):
        ws = [rng.choice(FUNCTION_WORDS) if rng.random() < function_rate else rng.choice(lexicon)
              for _ in range(rng.randint(*length))]
        if rng.random() < phrase_rate:
            ws.insert(rng.randrange(len(ws) + 1), rng.choice(PHRASES))
        sentence = " ".join(ws)
        out.append(sentence[:1].upper() + sentence[1:] + rng.choice(".!?."))
    return " ".join(out)


def historicize(text: str, gen: VariantGenerator, rng: random.Random, rate: float = 0.5) -> str:
    """Replace words (and multi-word map targets) with random historical variants."""
    out = []
    for surface, variants in segments(text, gen):
        older = [v for v in variants or () if v != surface]
        if older and rng.random() < rate:
            out.append(rng.choice(older))
        else:
            out.append(surface)
    return "".join(out)


def synthetic_pairs(n_novels: int = 20, paragraphs: tuple[int, int] = (40, 160),
                    changed_fraction: float = 0.35, seed: int = 0,
                    ruleset: RuleSet | None = None, lexicon_size: int = 1500) -> list[ParagraphPair]:
    """Aligned pairs for ``n_novels`` novels; about ``changed_fraction`` differ in spelling."""
    ruleset = ruleset or default_ruleset()
    gen = invert_ruleset(ruleset)
    rng = random.Random(seed)
    lexicon = contemporary_lexicon(lexicon_size, seed, ruleset, prefixed=False)
    pairs = []
    for n in range(n_novels):
        nid = f"novel{n:02d}"
        for k in range(rng.randint(*paragraphs)):
            tgt = make_paragraph(rng, lexicon)
            src = tgt
            if rng.random() < changed_fraction:
                for _ in range(20):
                    src = historicize(tgt, gen, rng, rate=0.5)
                    if src != tgt:
                        break
            pairs.append(ParagraphPair(f"{nid}:{k:05d}", nid, src, tgt, 2.0))
    return pairs


def _wiki(paragraphs):
    body = ["{{Nagłówek|autor=anon}}", "== Rozdział I =="]
    for p in paragraphs:
        body.append(p.replace("Generał", "''Generał''", 1) + "<ref>przypis</ref>")
    body.append("[[Kategoria:Powieści]]")
    return "\n\n".join(body) + "\n"


def _xml(paragraphs):
    inner = "\n".join(f"<akap>{p}</akap>" for p in paragraphs)
    return f'<?xml version="1.0" encoding="utf-8"?>\n<utwor><powiesc>\n{inner}\n</powiesc></utwor>\n'


def write_edition_corpus(directory, n_novels: int = 20, paragraphs: tuple[int, int] = (8, 14),
                         seed: int = 0, ruleset: RuleSet | None = None) -> Path:
    """Write historical MediaWiki and contemporary XML editions plus a JSONL manifest.

    Historical editions are aged copies of the contemporary text; occasionally
    two contemporary paragraphs appear joined in the historical edition.
    Returns the manifest path.
    """
    directory = Path(directory)
    ruleset = ruleset or default_ruleset()
    gen = invert_ruleset(ruleset)
    rng = random.Random(seed)
    lexicon = contemporary_lexicon(1500, seed, ruleset, prefixed=False)
    records = []
    for n in range(n_novels):
        modern = [make_paragraph(rng, lexicon) for _ in range(rng.randint(*paragraphs))]
        old = []
        k = 0
        while k < len(modern):
            p = modern[k]
            if rng.random() < 0.35:
                p = historicize(p, gen, rng, rate=0.5)
            if k + 1 < len(modern) and rng.random() < 0.08:
                p = p + " " + modern[k + 1]
                k += 1
            old.append(p)
            k += 1
        author = " ".join(rng.sample(AUTHOR_NAMES, 2))
        title = " ".join(w.capitalize() for w in rng.sample(lexicon, 3))
        hist_path = directory / f"hist{n:02d}.wiki"
        cont_path = directory / f"cont{n:02d}.xml"
        atomic_write(hist_path, _wiki(old))
        atomic_write(cont_path, _xml(modern))
        records.append({"id": f"ws{n:02d}", "source": HISTORICAL, "author": author,
                        "title": title, "year": 1890 + n, "path": hist_path.name})
        records.append({"id": f"wl{n:02d}", "source": CONTEMPORARY, "author": author,
                        "title": title, "year": 2000 + n, "path": cont_path.name})
    manifest = directory / "manifest.jsonl"
    atomic_write(manifest, jsonl(records))
    return manifest
