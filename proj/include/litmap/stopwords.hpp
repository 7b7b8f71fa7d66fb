#pragma once

#include <array>
#include <filesystem>
#include <sstream>
#include <string>
#include <unordered_set>

#include "litmap/error.hpp"
#include "litmap/stemmer.hpp"
#include "litmap/text_util.hpp"

namespace litmap {

namespace detail {

// Snowball lists, trimmed of archaic forms, plus a few academic fillers for English.
inline constexpr std::string_view kStopwordsEn =
    "a about above after again against all also am an and any are aren't as at be because been before being below "
    "between both but by can cannot could couldn't did didn't do does doesn't doing don't down during each et "
    "few for from further had hadn't has hasn't have haven't having he her here hers herself him himself his how "
    "however i if in into is isn't it it's its itself let's me more most mustn't my myself no nor not of off on "
    "once only or other ought our ours ourselves out over own same she should shouldn't so some such than that "
    "that's the their theirs them themselves then there there's these they this those through thus to too under "
    "until up upon very via was wasn't we were weren't what when where which while who whom why will with within "
    "without won't would wouldn't you your yours yourself yourselves al etc";

inline constexpr std::string_view kStopwordsFr =
    "au aux avec ce ces dans de des du elle en et eux il ils je la le les leur leurs lui ma mais me même mes moi "
    "mon ne nos notre nous on ou où par pas pour qu que qui sa se ses son sur ta te tes toi ton tu un une vos "
    "votre vous c d j l à m n s t y été étée étées étés étant suis es est sommes êtes sont serai seras sera "
    "serons serez seront serais serait serions seriez seraient étais était étions étiez étaient fus fut fûmes "
    "fûtes furent sois soit soyons soyez soient fusse fusses fût fussions fussiez fussent ayant eu eue eues eus "
    "ai as avons avez ont aurai auras aura aurons aurez auront aurais aurait aurions auriez auraient avais avait "
    "avions aviez avaient eut eûmes eûtes eurent aie aies ait ayons ayez aient eusse eusses eût eussions eussiez "
    "eussent ceci cela celà cet cette ici ils les leurs quel quels quelle quelles sans soi entre ainsi selon";

inline constexpr std::string_view kStopwordsEs =
    "de la que el en y a los del se las por un para con no una su al lo como más pero sus le ya o este sí "
    "porque esta entre cuando muy sin sobre también me hasta hay donde quien desde todo nos durante todos uno "
    "les ni contra otros ese eso ante ellos e esto mí antes algunos qué unos yo otro otras otra él tanto esa "
    "estos mucho quienes nada muchos cual poco ella estar estas algunas algo nosotros mi mis tú te ti tu tus "
    "ellas nosotras vosotros vosotras os mío mía míos mías tuyo tuya tuyos tuyas suyo suya suyos suyas nuestro "
    "nuestra nuestros nuestras vuestro vuestra vuestros vuestras esos esas estoy estás está estamos estáis "
    "están esté estés estemos estéis estén es son ser fue fueron era eran sido siendo ha han he hemos habéis "
    "había habían haber tiene tienen tener cada así según";

inline constexpr std::string_view kStopwordsDe =
    "aber alle allem allen aller alles als also am an ander andere anderem anderen anderer anderes anderm andern "
    "anders auch auf aus bei bin bis bist da damit dann das dass dasselbe dazu daß dein deine deinem deinen "
    "deiner deines dem demselben den denn denselben der derer derselbe derselben des desselben dessen dich die "
    "dies diese dieselbe dieselben diesem diesen dieser dieses dir doch dort du durch ein eine einem einen einer "
    "eines einig einige einigem einigen einiger einiges einmal er es etwas euch euer eure eurem euren eurer "
    "eures für gegen gewesen hab habe haben hat hatte hatten hier hin hinter ich ihm ihn ihnen ihr ihre ihrem "
    "ihren ihrer ihres im in indem ins ist jede jedem jeden jeder jedes jene jenem jenen jener jenes jetzt kann "
    "kein keine keinem keinen keiner keines können könnte machen man manche manchem manchen mancher manches mein "
    "meine meinem meinen meiner meines mich mir mit muss musste nach nicht nichts noch nun nur ob oder ohne sehr "
    "sein seine seinem seinen seiner seines selbst sich sie sind so solche solchem solchen solcher solches soll "
    "sollte sondern sonst über um und uns unsere unserem unseren unser unseres unter viel vom von vor während war "
    "waren warst was weg weil weiter welche welchem welchen welcher welches wenn werde werden wie wieder will wir "
    "wird wirst wo wollen wollte würde würden zu zum zur zwar zwischen";

inline std::unordered_set<std::string> split_words(std::string_view list) {
  std::unordered_set<std::string> out;
  std::istringstream in{std::string(list)};
  for (std::string w; in >> w;) out.insert(w);
  return out;
}

}  // namespace detail

class StopwordSet {
 public:
  static StopwordSet builtin() {
    StopwordSet s;
    s.lists_[0] = detail::split_words(detail::kStopwordsEn);
    s.lists_[1] = detail::split_words(detail::kStopwordsFr);
    s.lists_[2] = detail::split_words(detail::kStopwordsEs);
    s.lists_[3] = detail::split_words(detail::kStopwordsDe);
    return s;
  }

  // Built-in lists, with <dir>/<lang>.txt replacing the list for that language.
  // One token per line; blank lines and lines starting with '#' are ignored.
  static StopwordSet from_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("stopwords dir not found: " + dir.string());
    StopwordSet s = builtin();
    for (Language l : {Language::En, Language::Fr, Language::Es, Language::De}) {
      const auto path = dir / (std::string(language_code(l)) + ".txt");
      if (!std::filesystem::exists(path)) continue;
      std::unordered_set<std::string> words;
      std::istringstream in(text::read_file(path));
      for (std::string line; std::getline(in, line);) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
        const auto start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        words.insert(text::lowercase(line.substr(start)));
      }
      s.lists_[static_cast<std::size_t>(l)] = std::move(words);
    }
    return s;
  }

  bool contains(Language l, const std::string& lowered) const {
    return lists_[static_cast<std::size_t>(l)].count(lowered) > 0;
  }

 private:
  std::array<std::unordered_set<std::string>, 4> lists_;
};

}  // namespace litmap
