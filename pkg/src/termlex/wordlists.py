"""Built-in word lists for the language-screening heuristic.

The English list is fixed at 100 very common function words; the
French+Spanish list plays the same role for the dominant non-English
languages in agronomy reference exports. Tokens are matched lowercase.
A word may legitimately appear in both lists; hits are counted per list.
English homographs that are far more likely to be English in titles
("on", "or", "car", "a", "no") are deliberately left out of the
French+Spanish list.
"""

ENGLISH_STOPWORDS = frozenset(
    """
    the of and a an to in on for with
    from by at as is are was were be been
    being it its this that these those or not no
    but if then than so such which who whose what
    when where why how all any both each few more
    most other some only own same can could may might
    must shall should will would do does did done has
    have had having we you he she they them their
    his her our your into over under between among through
    during before after above below up out about against towards
    """.split()
)

FRENCH_SPANISH_STOPWORDS = frozenset(
    """
    le la les des du de un une et ou où dans sur sous pour par
    avec sans entre vers chez au aux ce cet cette ces son sa ses
    leur leurs notre nos votre vos qui que quoi dont ne pas plus
    moins très bien comme mais donc ni se si est sont être avoir
    fait été aussi ainsi autre autres même tout tous toute toutes
    quel quelle quels quelles lors après avant pendant depuis
    contre afin selon
    el los las del lo y e o u en con sin sobre bajo para por
    unos unas al su sus este esta estos estas ese esa esos esas
    quien cual cuales como más menos muy es ser estar hay sí pero
    sino también cuando donde hasta desde mediante según cada otro
    otra otros otras todo toda todos todas
    """.split()
)
