"""Embedded English stopword lists.

BASE_STOPWORDS is the classic 127-entry English list shipped by the
standard NLP toolkits. CONTRACTION_STOPWORDS carries the contraction
entries those toolkits later added (aren't, isn't, you're, ...), stored
here with apostrophes already removed because the cleaning pass deletes
apostrophes in place before the stopword filter runs; without these,
tokens like "arent" would survive cleaning.

DEFAULT_STOPWORDS (the union) is what CleaningConfig uses unless a
caller overrides it.
"""

BASE_STOPWORDS = frozenset({
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves",
    "you", "your", "yours", "yourself", "yourselves",
    "he", "him", "his", "himself", "she", "her", "hers", "herself",
    "it", "its", "itself", "they", "them", "their", "theirs", "themselves",
    "what", "which", "who", "whom", "this", "that", "these", "those",
    "am", "is", "are", "was", "were", "be", "been", "being",
    "have", "has", "had", "having", "do", "does", "did", "doing",
    "a", "an", "the", "and", "but", "if", "or", "because", "as",
    "until", "while", "of", "at", "by", "for", "with", "about",
    "against", "between", "into", "through", "during", "before",
    "after", "above", "below", "to", "from", "up", "down", "in",
    "out", "on", "off", "over", "under", "again", "further", "then",
    "once", "here", "there", "when", "where", "why", "how", "all",
    "any", "both", "each", "few", "more", "most", "other", "some",
    "such", "no", "nor", "not", "only", "own", "same", "so", "than",
    "too", "very", "s", "t", "can", "will", "just", "don", "should",
    "now",
})

# Toolkit contraction additions, normalized to their post-cleaning form
# (apostrophes stripped). Bare negation stems (aren, couldn, ...) are kept
# as shipped by the toolkit.
CONTRACTION_STOPWORDS = frozenset({
    "ain", "aren", "arent", "couldn", "couldnt", "didn", "didnt",
    "doesn", "doesnt", "dont", "hadn", "hadnt", "hasn", "hasnt",
    "haven", "havent", "isn", "isnt", "ma", "mightn", "mightnt",
    "mustn", "mustnt", "needn", "neednt", "shan", "shant", "shouldn",
    "shouldnt", "wasn", "wasnt", "weren", "werent", "won", "wont",
    "wouldn", "wouldnt",
    "d", "ll", "m", "o", "re", "ve", "y",
    "shes", "shouldve", "thatll", "youd", "youll", "youre", "youve",
})

DEFAULT_STOPWORDS = BASE_STOPWORDS | CONTRACTION_STOPWORDS
