#!/usr/bin/env python3
"""Regenerates the small end-to-end fixture corpora under pipeline/."""
import csv
import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent / "pipeline"
rng = random.Random(7)

COLUMNS = ["tweetid", "userid", "user_display_name", "user_screen_name", "user_profile_description",
           "follower_count", "following_count", "account_creation_date", "tweet_time", "tweet_text",
           "is_retweet", "retweet_userid", "in_reply_to_userid", "quoted_tweet_tweetid", "user_mentions",
           "hashtags", "urls", "tweet_language", "account_language"]

takedown = [
    ("1001", "hocaket", "Hoca Ket", "My main account. RT Account: @hocaketrt", "2016-03-01"),
    ("1002", "hocaketrt", "Hoca RT", "rt hesabı. Ana hesap: @hocaket", "2016-04-01"),
    ("1003", "ihsantopbas", "İhsan Topbaş", "BACKUP ACCOUNT. MAIN ACCOUNT: @ihsan_main", "2017-01-10"),
    ("1004", "avhasanteke", "Av. Hasan Teke", "Avukat. #MilliTakipMerkezi", "2015-06-12"),
    ("1005", "enderunkartal", "💢ENDERUN💢 Kartal", "ENDERUN 5 RT & FAV accounts", "2018-02-02"),
    ("1006", "osmanlitorunu", "⭐Osmanlı Torunu⭐", "Vatan sevdalısı", "2018-09-09"),
    ("1007", "", "", "Memleket meselesi", "2019-01-01"),
    ("1008", "sadecevatan", "Sadece Vatan", "Türkiye sevdası", "2014-05-05"),
    ("1009", "aksamhaber", "Akşam Haber", "Haber ve yorum", "2013-11-11"),
    ("1010", "kizilelma", "Kızıl Elma", "", "2017-07-07"),
]
hashed = {"1007": "a3f1c9e8d2b47f60a3f1c9e8d2b47f60"}

live = [
    ("2001", "hocaketum", "Hoca Ket", "New account, old one is suspended!", "2020-03-01", "suspended_late"),
    ("2002", "ihsan_topbas42", "İhsan Topbaş", "Yedek değil, yeni hesabım", "2020-05-10", "suspended_early"),
    ("2003", "av_hasanteke27", "Av. Hasan Teke", "Avukat", "2020-02-14", "active"),
    ("2004", "yeniufuklar", "Yeni Ufuklar", "Gruplara ekle", "2020-08-08", "suspended_early"),
    ("2005", "ankarasesi", "Ankara Sesi", "Başkentten haberler", "2021-01-20", "active"),
    ("2006", "marmarakiyisi", "Marmara Kıyısı", "Deniz ve şiir", "2020-10-10", "suspended_late"),
    ("2007", "eskihesap", "Eski Hesap", "Filtered by creation year", "2018-01-01", "active"),
    ("2008", "sessizkalem", "Sessiz Kalem", "", "2020-12-12", "none"),
]
negative = [
    ("3001", "kahvesever", "Kahve Sever", "Kahve ve kitap", "2012-01-01"),
    ("3002", "bisikletci", "Bisikletçi", "Pedal", "2011-02-02"),
]

handles = {uid: h for uid, h, *_ in takedown + live + negative}
tweet_counter = [5000]


def next_id():
    tweet_counter[0] += 1
    return str(tweet_counter[0])


def make_tweets(users, year_range, count):
    rows = []
    ids = [u[0] for u in users]
    for _ in range(count):
        author = rng.choice(users)
        uid = author[0]
        month = rng.randint(1, 12)
        year = rng.choice(year_range)
        ts = f"{year}-{month:02d}-{rng.randint(1, 28):02d} {rng.randint(0, 23):02d}:{rng.randint(0, 59):02d}"
        kind = rng.random()
        others = [o for o in ids if o != uid]
        mentions = rng.sample(others, rng.randint(0, min(2, len(others))))
        row = dict(tweetid=next_id(), userid=uid, tweet_time=ts, is_retweet="false", retweet_userid="",
                   in_reply_to_userid="", quoted_tweet_tweetid="", hashtags=[], urls=[])
        text = " ".join("@" + handles[m] for m in mentions if handles.get(m)) + " merhaba dünya"
        if kind < 0.45:
            target = rng.choice(others)
            row["is_retweet"] = "true"
            row["retweet_userid"] = target
            text = f"RT @{handles.get(target) or target}: paylaşım"
        elif kind < 0.6:
            row["in_reply_to_userid"] = rng.choice(others)
        elif kind < 0.7 and rows:
            row["quoted_tweet_tweetid"] = rng.choice(rows)["tweetid"]
        if uid in ("1004", "1008") and rng.random() < 0.5:
            row["hashtags"] = ["MilliTakipMerkezi"]
        row["tweet_text"] = text.strip()
        row["user_mentions"] = mentions
        rows.append(row)
    return rows


def follow_train(uid, targets, when):
    text = " ".join("@" + handles[t] for t in targets if handles.get(t)) + " takip"
    return dict(tweetid=next_id(), userid=uid, tweet_time=when, is_retweet="false", retweet_userid="",
                in_reply_to_userid="", quoted_tweet_tweetid="", hashtags=[], urls=[], tweet_text=text,
                user_mentions=[t for t in targets])


def user_fields(u):
    uid, handle, name, desc, created = u[:5]
    if uid in hashed:
        handle = name = hashed[uid]
    return dict(userid=uid, user_display_name=name, user_screen_name=handle, user_profile_description=desc,
                follower_count=str(100 + int(uid) % 97), following_count=str(90 + int(uid) % 89),
                account_creation_date=created, tweet_language="tr", account_language="tr")


def fmt_list(items):
    return "[" + ", ".join("'" + i + "'" for i in items) + "]"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    td_rows = make_tweets(takedown, [2018, 2019, 2020], 140)
    td_rows.append(follow_train("1005", ["1001", "1002", "1003", "1004", "1006", "1008"], "2020-01-15 10:00"))
    # Cross-corpus traffic during January 2020.
    for src, dst in [("1001", "2001"), ("1002", "2001"), ("1005", "2004"), ("1003", "2002"), ("1006", "2003")]:
        td_rows.append(dict(tweetid=next_id(), userid=src, tweet_time="2020-01-20 12:00", is_retweet="true",
                            retweet_userid=dst, in_reply_to_userid="", quoted_tweet_tweetid="", hashtags=[],
                            urls=[], tweet_text=f"RT @{handles[dst]}: destek", user_mentions=[]))
    by_user = {u[0]: u for u in takedown}
    with open(OUT / "takedown.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(COLUMNS)
        for r in td_rows:
            fields = user_fields(by_user[r["userid"]])
            fields.update(r)
            fields["user_mentions"] = fmt_list(r["user_mentions"])
            fields["hashtags"] = fmt_list(r["hashtags"])
            fields["urls"] = fmt_list(r["urls"])
            w.writerow([fields[c] for c in COLUMNS])
        # One malformed row exercises the rejection path without breaching the budget.
        w.writerow(["9999", "1009", "Akşam Haber", "aksamhaber", "x", "many", "1", "2013-11-11",
                    "2019-01-01 00:00", "bad counts", "false", "", "", "", "[]", "[]", "[]", "tr", "tr"])

    lv_rows = make_tweets([u[:5] for u in live], [2020, 2021], 80)
    for src, dst in [("2001", "1001"), ("2004", "1005"), ("2002", "1003")]:
        lv_rows.append(dict(tweetid=next_id(), userid=src, tweet_time="2020-01-25 09:30", is_retweet="false",
                            retweet_userid="", in_reply_to_userid=dst, quoted_tweet_tweetid="", hashtags=[],
                            urls=[], tweet_text=f"@{handles[dst]} aynen", user_mentions=[dst]))
    lby = {u[0]: u for u in live}
    with open(OUT / "live.jsonl", "w", encoding="utf-8") as f:
        for r in lv_rows:
            fields = user_fields(lby[r["userid"]][:5])
            fields.update(r)
            fields["is_retweet"] = fields["is_retweet"] == "true"
            f.write(json.dumps(fields, ensure_ascii=False) + "\n")

    ng_rows = make_tweets(negative, [2020], 12)
    nby = {u[0]: u for u in negative}
    with open(OUT / "negative.jsonl", "w", encoding="utf-8") as f:
        for r in ng_rows:
            fields = user_fields(nby[r["userid"]])
            fields.update(r)
            fields["is_retweet"] = fields["is_retweet"] == "true"
            f.write(json.dumps(fields, ensure_ascii=False) + "\n")

    with open(OUT / "suspensions.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["user_id", "status", "checked_at"])
        for uid, *_rest, status in live:
            if status == "none":
                continue
            w.writerow([uid, "suspended" if status == "suspended_early" else "active", "2021-03-01T00:00:00Z"])
            w.writerow([uid, "active" if status == "active" else "suspended", "2021-09-01T00:00:00Z"])

    config = {
        "corpora": {"takedown": ["takedown.csv"], "live": ["live.jsonl"], "negative": ["negative.jsonl"]},
        "suspensions": "suspensions.csv",
        "live_filter": {"min_creation_year": 2020, "excluded_user_ids": []},
        "seed": 20230601,
        "trials": 5,
        "windows": [{"name": "jan2020", "start": "2020-01-01", "end": "2020-02-01"}],
        "max_reject_ratio": 0.01,
    }
    (OUT / "config.json").write_text(json.dumps(config, indent=2) + "\n")


if __name__ == "__main__":
    main()
