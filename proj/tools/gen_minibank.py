#!/usr/bin/env python3
"""Regenerates the mini-bank fixture: manifest, CSV data and metadata graph.

The output is deterministic (fixed seed); the generated files are committed so the
build does not depend on Python.
"""
import csv
import datetime as dt
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parent.parent / "data" / "minibank"

SCHEMA = {
    "parties": [("id", "number"), ("type", "text")],
    "individuals": [("id", "number"), ("firstName", "text"), ("lastName", "text"),
                    ("birthday", "date"), ("salary", "number")],
    "organizations": [("id", "number"), ("companyname", "text")],
    "addresses": [("id", "number"), ("individual_id", "number"), ("street", "text"), ("city", "text")],
    "financial_instruments": [("id", "number"), ("name", "text"), ("parent_id", "number")],
    "transactions": [("id", "number"), ("fromParty", "number"), ("toParty", "number")],
    "fi_transactions": [("id", "number"), ("amount", "number"), ("transactiondate", "date"),
                        ("instrument_id", "number")],
    "money_transactions": [("id", "number"), ("amount", "number"), ("currency", "text"),
                           ("transactiondate", "date")],
}

FIRST = ["Anna", "Beat", "Claudia", "Daniel", "Eva", "Felix", "Gabriela", "Hans", "Ines", "Jonas",
         "Katrin", "Luca", "Monika", "Nico", "Olivia", "Peter", "Ruth", "Stefan", "Tanja", "Urs"]
LAST = ["Ammann", "Baumann", "Frei", "Gerber", "Huber", "Kaufmann", "Lehmann", "Meier", "Moser",
        "Muller", "Schmid", "Steiner", "Weber", "Widmer", "Zimmermann", "Fischer", "Graf", "Roth"]
CITIES = ["Basel", "Bern", "Lausanne", "Lugano", "Luzern", "St. Gallen", "Winterthur", "Zürich"]
STREETS = ["Bahnhofstrasse", "Seestrasse", "Kirchweg", "Dorfstrasse", "Bergstrasse", "Lindenhof"]
ORG_WORDS = ["Alpenblick", "Bergkristall", "Calanda", "Dufour", "Edelweiss", "Forelle", "Gotthard",
             "Hasli", "Iseltwald", "Jungfrau", "Kander", "Lavaux", "Matterhorn", "Napf", "Oberland",
             "Pilatus", "Quinten", "Rigi", "Saentis", "Titlis", "Uetli", "Vadret", "Weissenstein",
             "Xerxes", "Ybrig"]
ORG_SUFFIX = ["AG", "Holding"]
INSTRUMENTS = ["Bond", "Fund", "Share", "Option", "Note"]
CURRENCIES = ["CHF", "EUR", "USD", "YEN"]


def day(rng, start, end):
    span = (end - start).days
    return start + dt.timedelta(days=rng.randrange(span + 1))


def build(rng):
    rows = {name: [] for name in SCHEMA}

    people = [("Sara", "Guttinger", dt.date(1975, 2, 11), 95000),
              ("Sara", "Keller", dt.date(1988, 7, 30), 61000),
              ("Marco", "Rossi", dt.date(1981, 4, 23), 82000),
              ("Lena", "Brunner", dt.date(1981, 4, 23), 41000)]
    while len(people) < 60:
        b = day(rng, dt.date(1950, 1, 1), dt.date(1999, 12, 31))
        if b == dt.date(1981, 4, 23):
            continue
        people.append((rng.choice(FIRST), rng.choice(LAST), b, rng.randrange(30, 240) * 500))
    for i, (first, last, born, salary) in enumerate(people, start=1):
        rows["parties"].append([i, "individual"])
        rows["individuals"].append([i, first, last, born.isoformat(), salary])

    orgs = ["Alpina"] + [f"{w} {s}" for w in ORG_WORDS for s in ORG_SUFFIX][:49]
    for k, name in enumerate(orgs):
        oid = 101 + k
        rows["parties"].append([oid, "organization"])
        rows["organizations"].append([oid, name])

    for i in range(1, 61):
        city = "Zürich" if i == 1 else rng.choice(CITIES)
        rows["addresses"].append([i, i, f"{rng.choice(STREETS)} {rng.randrange(1, 120)}", city])
    for i in range(61, 71):
        rows["addresses"].append([i, rng.randrange(2, 61), f"{rng.choice(STREETS)} {rng.randrange(1, 120)}",
                                  rng.choice(CITIES)])

    # Instrument 50 is a structured product; 45..49 are its components.
    for i in range(1, 50):
        name = "Alpina Fund" if i == 1 else f"{ORG_WORDS[i % len(ORG_WORDS)]} {INSTRUMENTS[i % 5]} {2010 + i % 9}"
        rows["financial_instruments"].append([i, name, 50 if i >= 45 else None])
    rows["financial_instruments"].append([50, "Structured Note Helix", None])

    # Organizations 101..110 receive 1..10 instrument transactions (distinct counts).
    tid = 1
    for k in range(10):
        for _ in range(k + 1):
            rows["transactions"].append([tid, rng.randrange(1, 61), 101 + k])
            rows["fi_transactions"].append([tid, rng.randrange(1, 400) * 100,
                                            day(rng, dt.date(2011, 1, 1), dt.date(2011, 12, 31)).isoformat(),
                                            rng.randrange(1, 51)])
            tid += 1
    for _ in range(60):
        to = rng.choice([rng.randrange(1, 61), rng.randrange(111, 151)])
        rows["transactions"].append([tid, rng.randrange(1, 61), to])
        rows["money_transactions"].append([tid, rng.randrange(1, 900) * 50, rng.choice(CURRENCIES),
                                           day(rng, dt.date(2011, 1, 1), dt.date(2012, 6, 30)).isoformat()])
        tid += 1
    return rows


def write_data(rows):
    with open(ROOT / "manifest.txt", "w") as f:
        f.write("# mini-bank schema: one block per table\n")
        for name, cols in SCHEMA.items():
            f.write(f"\ntable {name}\n")
            for col, typ in cols:
                f.write(f"column {col} {typ}\n")
            f.write("pk id\n")
    for name, cols in SCHEMA.items():
        with open(ROOT / "csv" / f"{name}.csv", "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow([c for c, _ in cols])
            for r in rows[name]:
                w.writerow(["" if v is None else v for v in r])


def graph_triples():
    t = []

    def add(s, p, o):
        t.append((s, p, o))

    for cls in ["physical_table", "physical_column", "primary_key", "join_relationship", "inheritance_node"]:
        add(cls, "layer", "physical")

    def col(table, c):
        return f"pc_{table}_{c}"

    for table, cols in SCHEMA.items():
        tn = f"pt_{table}"
        add(tn, "tablename", table)
        add(tn, "type", "<physical_table>")
        add(tn, "layer", "physical")
        for c, _ in cols:
            cn = col(table, c)
            add(tn, "column", f"<{cn}>")
            add(cn, "columnname", c)
            add(cn, "type", "<physical_column>")
            add(cn, "layer", "physical")
            if c == "id":
                add(cn, "type", "<primary_key>")

    add(col("addresses", "individual_id"), "foreign_key", f"<{col('individuals', 'id')}>")
    for name, fk, pk in [("jr_transactions_from", col("transactions", "fromParty"), col("parties", "id")),
                         ("jr_transactions_to", col("transactions", "toParty"), col("organizations", "id")),
                         ("jr_fi_transactions_instrument", col("fi_transactions", "instrument_id"),
                          col("financial_instruments", "id")),
                         ("jr_financial_instruments_parent", col("financial_instruments", "parent_id"),
                          col("financial_instruments", "id"))]:
        add(name, "type", "<join_relationship>")
        add(name, "layer", "physical")
        add(name, "primary_key_of", f"<{pk}>")
        add(name, "foreign_key_of", f"<{fk}>")

    for name, parent, children in [("in_parties", "parties", ["individuals", "organizations"]),
                                   ("in_transactions", "transactions", ["fi_transactions", "money_transactions"])]:
        add(name, "type", "<inheritance_node>")
        add(name, "layer", "physical")
        add(name, "inheritance_parent", f"<pt_{parent}>")
        for c in children:
            add(name, "inheritance_child", f"<pt_{c}>")

    # Logical layer: entities and attributes implemented by physical nodes.
    logical = [("le_financial_instruments", "financial instruments", "pt_financial_instruments"),
               ("le_fi_transactions", "securities transactions", "pt_fi_transactions"),
               ("le_money_transactions", "money transactions", "pt_money_transactions"),
               ("le_individuals_firstname", "given name", col("individuals", "firstName")),
               ("le_individuals_lastname", "family name", col("individuals", "lastName")),
               ("le_individuals_birthday", "birth date", col("individuals", "birthday")),
               ("le_organizations_companyname", "company name", col("organizations", "companyname")),
               ("le_fi_transactions_transactiondate", "transaction date", col("fi_transactions", "transactiondate")),
               ("le_money_transactions_transactiondate", "transaction date",
                col("money_transactions", "transactiondate"))]
    for node, label, target in logical:
        add(node, "layer", "logical")
        add(node, "concept_label", label)
        add(node, "implements", f"<{target}>")

    add("ce_financial_instruments", "layer", "conceptual")
    add("ce_financial_instruments", "concept_label", "financial instruments")
    add("ce_financial_instruments", "implements", "<le_financial_instruments>")
    add("ce_financial_instruments", "implements", "<le_fi_transactions>")

    # Domain ontology.
    for node, label in [("onto_customers", "customers"), ("onto_private_customers", "private customers"),
                        ("onto_corporate_customers", "corporate customers"), ("onto_transactions", "transactions"),
                        ("onto_wealthy_customers", "wealthy customers")]:
        add(node, "layer", "ontology")
        add(node, "concept_label", label)
    add("onto_customers", "narrower", "<onto_private_customers>")
    add("onto_customers", "narrower", "<onto_corporate_customers>")
    add("onto_private_customers", "refers_to", "<pt_individuals>")
    add("onto_corporate_customers", "refers_to", "<pt_organizations>")
    add("onto_transactions", "refers_to", "<pt_fi_transactions>")
    add("onto_wealthy_customers", "refers_to", "<pt_individuals>")
    add("onto_wealthy_customers", "filter_column", f"<{col('individuals', 'salary')}>")
    add("onto_wealthy_customers", "filter_op", ">=")
    add("onto_wealthy_customers", "filter_value", "100000")

    for node, label, target in [("syn_customer", "customer", "pt_parties"), ("syn_client", "client", "pt_parties"),
                                ("syn_company", "company", "pt_organizations")]:
        add(node, "layer", "synonym")
        add(node, "concept_label", label)
        add(node, "synonym_of", f"<{target}>")
    return t


def write_graph():
    with open(ROOT / "graph.tsv", "w", encoding="utf-8") as f:
        f.write("# mini-bank metadata graph: subject, predicate, object (<node> or text label)\n")
        for s, p, o in graph_triples():
            f.write(f"{s}\t{p}\t{o}\n")


if __name__ == "__main__":
    (ROOT / "csv").mkdir(parents=True, exist_ok=True)
    write_data(build(random.Random(20111)))
    write_graph()
