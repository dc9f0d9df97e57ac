#include "support/fixture_corpus.hpp"

#include <array>
#include <cctype>
#include <iomanip>
#include <random>
#include <sstream>

#include "tokparity/pronouns.hpp"
#include "tokparity/rng.hpp"

namespace tokparity::testsupport {

namespace {

const std::array<const char*, 20> kHeNames = {
    "Miguel", "Henrik", "Tomas",  "Arjun",  "Mateo", "Kofi",   "Viktor", "Samuel",
    "Ibrahim", "Lorenzo", "Anders", "Pavel", "Marcus", "Dmitri", "Joaquin", "Emeka",
    "Farid",  "Gustav", "Niklas", "Otto"};
const std::array<const char*, 20> kSheNames = {
    "Rosa",  "Ingrid", "Amara",  "Lucia", "Noor",  "Keiko",  "Sofia", "Helena",
    "Priya", "Marta",  "Zainab", "Clara", "Yuki",  "Esther", "Dalia", "Freya",
    "Camila", "Leona", "Bianca", "Aisha"};
const std::array<const char*, 20> kSurnames = {
    "Alvarez", "Okafor", "Lindqvist", "Tanaka", "Costa", "Haddad", "Petrov",
    "Moreau",  "Silva",  "Novak",     "Fischer", "Deng", "Ortega", "Banda",
    "Keller",  "Rossi",  "Varga",     "Mbeki",  "Larsen", "Quispe"};
const std::array<const char*, 22> kOccupations = {
    "architect",  "poet",        "violinist",    "filmmaker",  "chemist",
    "historian",  "sculptor",    "botanist",     "journalist", "composer",
    "painter",    "mathematician", "novelist",   "engineer",   "photographer",
    "cartographer", "linguist",  "astronomer",   "choreographer", "printmaker",
    "saxophonist", "taxidermist"};
const std::array<const char*, 20> kNationalities = {
    "chilean",  "finnish",   "ghanaian", "japanese", "brazilian", "lebanese",
    "bulgarian", "french",   "portuguese", "czech",  "austrian",  "malaysian",
    "mexican",  "zambian",   "swiss",    "italian",  "hungarian", "kenyan",
    "danish",   "peruvian"};
const std::array<const char*, 20> kCities = {
    "valparaiso", "tampere", "kumasi", "osaka",  "recife", "beirut", "plovdiv",
    "lyon",       "porto",   "brno",   "graz",   "penang", "oaxaca", "lusaka",
    "bern",       "turin",   "szeged", "nakuru", "aarhus", "cusco"};

// Body sentence shapes. Slots: {nom} {acc} {gen} {genind} {reflex} with
// {Nom}/{Gen} for sentence-initial capitalization, plus {first} {city} {year}.
// Several sentences deliberately carry x-heavy vocabulary (taxes, xenon,
// saxophone) so subword pieces like "xe" stay shared with ordinary words the
// way they are in real corpora.
const std::array<const char*, 26> kBodySentences = {
    "{Nom} studied at the academy in {city}.",
    "{Nom} currently lives somewhere near {city}.",
    "{Nom} also directs television for a local studio.",
    "before the war, {nom} taught in {city}.",
    "upon recognizing {first}, the fans asked {acc} for an autograph.",
    "colleagues often joined {acc} for long walks.",
    "the committee invited {acc} to {city}.",
    "neighbors still greet {acc} at the market.",
    "{Gen} debut album was released in march.",
    "{Nom} finished {gen} memoir after years of notes.",
    "critics praised {gen} early designs.",
    "{Gen} book won several awards.",
    "{Nom} kept {gen} notes in a leather satchel.",
    "the phone on the desk is probably {genind}.",
    "the final word in the studio was always {genind}.",
    "the smaller slice of pizza was {genind}.",
    "{Nom} often works alone by {reflex}.",
    "{Nom} prefers to travel by {reflex}.",
    "{Nom} recorded the whole piece by {reflex}.",
    "{Nom} moved to {city} in {year}.",
    "friends gave the spare keys back to {acc} afterwards.",
    "{Nom} wrote about {gen} childhood in {city}.",
    "{Nom} pays {gen} taxes at the town exchange.",
    "{Nom} practices the saxophone near the textile mill.",
    "{Nom} keeps a xylophone beside the fax machine.",
    "after dark, {nom} fixes the xenon lamp in the annex.",
};

const std::array<const char*, 6> kFillerSentences = {
    "the town built a new library in {year}.",
    "visitors arrive from {city} every spring.",
    "the harbor festival returns each autumn.",
    "local archives keep records from {year}.",
    "visitors examine the wax exhibits and the xenon lamps.",
    "the express taxi waits by the mailbox on the axis road.",
};

std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

std::string fill_slot(std::string text, const std::string& slot, const std::string& value) {
    std::size_t pos;
    while ((pos = text.find(slot)) != std::string::npos) text.replace(pos, slot.size(), value);
    return text;
}

}  // namespace

std::vector<Document> make_fixture_biographies(std::size_t count, std::uint64_t seed) {
    const PronounLexicon lexicon = PronounLexicon::bundled();
    std::mt19937_64 rng(seed);
    std::vector<Document> docs;
    docs.reserve(count);

    for (std::size_t n = 0; n < count; ++n) {
        const bool is_he = uniform_below(rng, 2) == 0;
        const PronounFamily& family = lexicon.at(is_he ? "he" : "she");
        const std::string first =
            is_he ? kHeNames[uniform_below(rng, kHeNames.size())]
                  : kSheNames[uniform_below(rng, kSheNames.size())];
        const std::string last = kSurnames[uniform_below(rng, kSurnames.size())];
        const std::string occ = kOccupations[uniform_below(rng, kOccupations.size())];
        const std::string nat = kNationalities[uniform_below(rng, kNationalities.size())];
        const std::string city = kCities[uniform_below(rng, kCities.size())];
        const std::string year = std::to_string(1950 + uniform_below(rng, 61));

        std::ostringstream text;
        const bool filler_only = uniform_below(rng, 100) < 5;
        const std::uint64_t opening = uniform_below(rng, 100);
        if (filler_only) {
            text << capitalize(fill_slot(
                fill_slot(kFillerSentences[uniform_below(rng, kFillerSentences.size())], "{year}",
                          year),
                "{city}", city));
        } else if (opening < 40) {
            text << first << ' ' << last << " is a " << nat << ' ' << occ << '.';
        } else if (opening < 65) {
            text << first << ' ' << last << ", who uses the pronouns " << declaration(family)
                 << ", is a " << nat << ' ' << occ << '.';
        } else {
            text << first << ' ' << last << " uses the pronouns " << declaration(family) << ". "
                 << capitalize(family.form(PronounCase::Nominative)) << " is a " << nat << ' '
                 << occ << '.';
        }

        if (!filler_only) {
            const std::size_t body_count = 3 + uniform_below(rng, 3);
            std::vector<std::size_t> picks;
            while (picks.size() < body_count) {
                const std::size_t pick = uniform_below(rng, kBodySentences.size());
                bool seen = false;
                for (std::size_t p : picks) seen = seen || p == pick;
                if (!seen) picks.push_back(pick);
            }
            for (std::size_t pick : picks) {
                std::string s = kBodySentences[pick];
                s = fill_slot(s, "{Nom}", capitalize(family.form(PronounCase::Nominative)));
                s = fill_slot(s, "{nom}", family.form(PronounCase::Nominative));
                s = fill_slot(s, "{acc}", family.form(PronounCase::Accusative));
                s = fill_slot(s, "{Gen}", capitalize(family.form(PronounCase::PossessivePronominal)));
                s = fill_slot(s, "{gen}", family.form(PronounCase::PossessivePronominal));
                s = fill_slot(s, "{genind}", family.form(PronounCase::PossessivePredicative));
                s = fill_slot(s, "{reflex}", family.form(PronounCase::Reflexive));
                s = fill_slot(s, "{first}", first);
                s = fill_slot(s, "{city}", city);
                s = fill_slot(s, "{year}", year);
                text << ' ' << capitalize(std::move(s));
            }
        }

        Document doc;
        std::ostringstream id;
        id << "bio-" << std::setw(4) << std::setfill('0') << n;
        doc.id = id.str();
        doc.text = text.str();
        docs.push_back(std::move(doc));
    }
    return docs;
}

}  // namespace tokparity::testsupport
