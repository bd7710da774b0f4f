"""Tag vocabularies of the synthetic city."""

ZONES = (
    "residential",
    "commercial",
    "industrial",
    "education",
    "health",
    "civic",
    "recreation",
    "hospitality",
)

BUILDING_TAGS = {
    "residential": ("building=residential", "building=apartments", "building=house"),
    "commercial": ("building=retail", "building=commercial", "shop=supermarket"),
    "industrial": ("building=industrial", "building=warehouse", "man_made=works"),
    "education": ("building=school", "amenity=school", "building=university"),
    "health": ("building=hospital", "amenity=clinic", "healthcare=centre"),
    "civic": ("building=civic", "amenity=townhall", "office=government"),
    "recreation": ("leisure=sports_centre", "building=pavilion", "leisure=stadium"),
    "hospitality": ("building=hotel", "tourism=hotel", "building=hostel"),
}

POI_TAGS = {
    "residential": ("amenity=kindergarten", "shop=convenience", "shop=laundry"),
    "commercial": ("shop=clothes", "amenity=cafe", "shop=electronics", "amenity=bank"),
    "industrial": ("craft=metal", "shop=hardware", "amenity=fuel"),
    "education": ("amenity=library", "amenity=cafeteria", "shop=books"),
    "health": ("amenity=pharmacy", "healthcare=dentist", "amenity=doctors"),
    "civic": ("amenity=post_office", "amenity=police", "amenity=courthouse"),
    "recreation": ("leisure=pitch", "amenity=bar", "shop=sports"),
    "hospitality": ("amenity=restaurant", "amenity=fast_food", "tourism=guest_house"),
}

STREET_TAGS = (
    "highway=bus_stop",
    "amenity=bench",
    "amenity=waste_basket",
    "highway=street_lamp",
    "amenity=bicycle_parking",
)

ROAD_TAGS = {"primary": "highway=primary", "residential": "highway=residential"}

ROAD_SPEED_BASE = {"primary": 45.0, "residential": 25.0}
