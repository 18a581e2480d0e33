#include <algorithm>
#include <sstream>

#include "pagebound/store.hpp"

namespace pagebound {
namespace {

// Generated from data/headwords.txt.
constexpr const char* kHeadwords = R"(
aalii abacus abalone abattoir abbey abdomen aberration abrasive abscissa absinthe acacia acanthus accordion acetone acetylene achene acid acorn acoustics acrobat acropolis actinium adder adobe adze aerosol agate agave aileron albatross alchemy alder alfalfa algae algebra alkali alloy almanac almond aloe alpaca altimeter alum aluminium amaranth amber ammonia amoeba amphora anchor anchovy anemone aneroid angora aniline anise anode antelope anther anthracite antimony anvil aorta apiary aqueduct arabesque arbor archipelago argon armadillo arsenic artichoke asbestos ash asphalt aster astrolabe atoll aurora avalanche avocado axolotl azalea
baboon badger bagpipe balalaika baleen ballast balsa bamboo banjo banyan baobab barite barley barnacle barometer basalt basilisk bassoon bauxite bayonet beacon beaver beech belfry bellows benzene beryl bilge biplane bismuth bison bittern blacksmith blimp bobbin boll bonsai borax boron boulder bracken brass breccia brig brimstone broccoli bromine bronze buckwheat bugle bulrush buttress buzzard
cabbage cactus cadmium caisson calcite calcium caldera calliope camber camel camellia camphor canal canary candela canoe cantilever capstan caravel carbine carburetor cardamom caribou carillon carnelian carob carp cartography cassava castanets catamaran catapult cathode cedar celery cellulose cenotaph centrifuge ceramic cesium chalcedony chameleon chamois chandelier charcoal cheetah chestnut chicory chinchilla chisel chlorine chromium chrysanthemum cinnabar cinnamon cistern citadel citron clarinet clavichord clematis clepsydra cobalt cochineal cockatoo coconut colander condor conifer copper coral cordite coriander cormorant cornet corundum cotton cougar coyote crane cranberry crayfish creosote cricket crocus crossbow crucible cuckoo cumin cupola curium cyclotron cymbal cypress
daffodil dahlia damask damson dandelion daphne davit decanter delta derrick dew diamond diatom dinghy dingo diorite dirigible distaff dodo dolmen dolomite dolphin dormouse dragonfly drawbridge dromedary drumlin dulcimer dune dynamo dysprosium
eagle earwig ebony echidna eclipse eel egret eiderdown einsteinium elderberry electrode elm emerald emu enamel endive ermine escarpment estuary eucalyptus europium ewer
falcon feldspar felucca fennel fern ferret fig filbert finch fjord flamingo flax flint flounder fluorine fluorite flute forge forsythia foxglove francium frigate fuchsia fulcrum fumarole funicular furnace
gabbro gadolinium galena galleon gallium gannet gardenia garnet gazelle gecko geode geranium gerbil geyser gherkin gibbon ginger ginkgo giraffe glacier glockenspiel gneiss gnu goldfinch gondola gong gorilla gourd granite graphite grebe griddle grouse guava gudgeon guillemot guitar gypsum gyroscope
haddock hafnium hailstone halibut hammock hamster harmonica harp harpsichord harrier hawthorn hazel heather hedgehog helium hematite hemlock hemp heron herring hibiscus hickory hippopotamus holly hornbeam hornblende hourglass hovercraft hummingbird humus hyacinth hydrangea hydrogen hyena hygrometer
ibex ibis iceberg iguana ilmenite impala indigo indium iodine iridium iris iron ivory ivy
jacaranda jackal jade jaguar jasmine jasper javelin jellyfish jerboa jetty jonquil juniper jute
kale kaleidoscope kangaroo kaolin kapok kayak kelp kestrel kettledrum kiln kingfisher kiwi koala kohlrabi krill krypton kudzu kumquat
laburnum lacquer ladle lagoon lanthanum lapwing larch lark lathe lava lavender lemming lentil leopard lichen lighthouse lignite lilac lime limestone linden linen lithium lobster locust loom lotus lute lutetium lynx lyre
macaw mackerel magnesium magnetite magnolia mahogany malachite mallet mammoth manatee mandolin manganese mangrove manometer maple marble marimba marjoram marmot marten mastodon meerkat mercury meteorite mica millet mimosa mink minnow mistletoe moat molybdenum mongoose monocle moraine mortar mosaic moth mulberry mustang myrrh
narwhal nasturtium nautilus nectarine neodymium neon nettle newt nickel nightingale niobium nitrogen nutmeg nylon
oak oasis oboe obsidian ocarina ocelot octopus okapi okra oleander olive onyx opal opossum orangutan orchid oregano organ oriole osmium osprey ostrich otter owl oxygen oyster ozone
paddock pagoda palladium pangolin papyrus paraffin parchment parsnip partridge pelican pendulum penguin peony pepper periscope persimmon pestle petrel pewter pheasant phosphorus piccolo pigeon pine pistachio piston platinum platypus plutonium plywood pomegranate poplar porcupine porphyry potash potassium prism propeller pueblo puffin puma pumice pyramid pyrite python
quagga quail quarry quartz quasar quetzal quill quince quinine quinoa
rabbit raccoon radish radium radon raffia ragweed ramie rampart raspberry rattan raven redwood reed reindeer rhenium rhinoceros rhododendron rhubarb rhodium rosemary rubidium ruby rudder rutabaga ruthenium rye
saffron sage salamander salmon saltpeter samarium sandalwood sandpiper sapphire sardine sassafras satellite saxophone scallop scandium schooner scorpion sextant shale shrew silicon silver sitar skylark slate sloth smelt snapdragon sodium sorghum spinach sponge spruce squid starling stegosaurus stoat strontium sturgeon sulfur sundial swallow sycamore
tamarind tambourine tanager tantalum tapestry tapir taro tarragon teak tellurium termite terrapin thallium thimble thistle thorium thrush thulium thyme tin titanium toad tobacco tortoise toucan tourmaline trebuchet trellis trilobite trombone trout trumpet tuba tulip tundra tungsten turbine turmeric turnip turquoise
ukulele ultramarine umber umbrella uranium urchin
valerian vanadium vanilla velvet verbena vermilion vetch viaduct vicuna viola violin viper vole vulture
wagtail walnut walrus warbler wasp watercress weasel weevil whelk whippet willow windmill wisteria wolverine wombat woodpecker wren
xenon xylophone
yak yam yarrow yew ytterbium yttrium yucca
zebra zeppelin zinc zinnia zircon zirconium zither
)";

std::string count_word(std::size_t n) {
  static const char* kWords[] = {"zero", "one", "two", "three", "four", "five", "six",
                                 "seven", "eight", "nine", "ten", "eleven", "twelve",
                                 "thirteen", "fourteen", "fifteen"};
  return n < std::size(kWords) ? kWords[n] : std::to_string(n);
}

std::string describe(const std::string& word) {
  std::size_t vowels = std::count_if(word.begin(), word.end(), [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
  });
  std::string title = word;
  title[0] = static_cast<char>(title[0] - 'a' + 'A');
  return title + " is a headword of " + count_word(word.size()) + " letters and " +
         count_word(vowels) + " vowels, filed under the letter " +
         std::string(1, title[0]) + ".";
}

}  // namespace

const std::vector<Item>& bundled_encyclopedia() {
  static const std::vector<Item> corpus = [] {
    std::vector<Item> items;
    std::istringstream in(kHeadwords);
    std::string word;
    while (in >> word) items.push_back({Key(word), describe(word)});
    std::sort(items.begin(), items.end(),
              [](const Item& a, const Item& b) { return a.key < b.key; });
    return items;
  }();
  return corpus;
}

}  // namespace pagebound
