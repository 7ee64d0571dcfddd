#!/usr/bin/env python3
"""Regenerates data/sentiment_lexicon.tsv from the hand-curated word groups below.

Each group carries one polarity in [-1, 1]. Words were chosen for the register of
nursery rhymes and classic children's verse; the strengths are coarse on purpose.
"""
import sys

GROUPS = {
    0.8: """
        wonderful marvelous marvellous glorious delightful splendid magnificent excellent superb
        joyful joyous blissful beloved adore adored adores lovely love loved loves loving
        happiest happy happily happiness delight delighted delights rejoice rejoiced rejoicing
        cheerful cheerfully gleeful merry merrily jolly brilliant fantastic perfect perfectly
        treasure treasured beautiful beautifully heavenly best blessed bless blessing blessings
        triumph triumphant victorious wonder wondrous enchanting enchanted charming paradise
        """,
    0.6: """
        good goodness great kind kindly kindness gentle gently sweet sweetly sweetest sweetness
        pleasant pleasure pleasures glad gladly gladness smile smiled smiles smiling laugh laughed
        laughing laughter laughs fun funny playful play played playing plays pretty fair fine
        bright brightly brighter shining shine shines shone sunny warm warmly warmth cozy cosy
        friend friends friendly friendship hug hugs hugged kiss kissed kisses dear dearest darling
        honest honesty brave bravely bravery courage courageous hero heroes heroic proud praise
        praised hope hoped hopes hopeful hopefully peace peaceful peacefully calm calmly safe safely
        safety comfort comforted comforting comfortable grateful thankful thanks thank generous
        grace graceful gracious noble clever wise wisely wisdom bold strong strength healthy
        health free freedom nice gift gifts reward rewarded success successful succeed win won
        wins winning gold golden rich riches plenty bountiful feast feasting sing sang sings
        singing song songs dance danced dances dancing merriment festive holiday cheer cheered
        cheers cheering bloom blooming blossom blossoms spring sunshine rainbow treat treats
        yummy tasty delicious honey candy sugar spice nicest finest fairest loyal faithful
        true truly trust trusted helpful help helped helping helps care cared caring careful
        tender tenderly tenderness soft softly smooth sparkling sparkle sparkles twinkle twinkling
        dream dreams dreaming dreamed magic magical fairy fairies angel angels star stars
        admire admired admiring adventure adventures amuse amused amusing applause applaud
        attractive awesome beauty bravest calmest celebrate celebrated celebration champion
        charm cherish cherished comforts compassion confident content contented courteous
        cuddle cuddled cuddly dainty daring decent devoted dignity eager elegant encourage
        encouraged energetic enjoyment excited exciting faith fancy fond fondly fortunate
        fortune friendliest gallant gentlest giggle giggled giggles giggling glee glow glowing
        goodly graceful gratitude happier harmony heal healed helper hooray hurrah hurray
        innocent inspire inspired jewel jewels jest jests jingle jingling jolliest joy joys
        kindest lucky luck marvel mercy merciful mirth nourish nourished patience playmate
        plenty polish polished prosper prosperous purest pure radiant refreshing relief relieved
        respect respected reward rewards romp romping rosy satisfied secure serene shelter
        sheltered sincere smiley snug splendour splendor sunlit support supported sweetheart
        thrive thrived thriving tidings valiant victory virtue virtuous warmest wealth wealthy
        welcoming wholesome win winner wonderfully worthy yay zest
        """,
    0.4: """
        okay ok well better fresh clean neat tidy ready able easy easily quiet quietly still
        steady simple simply plain calmer cool useful valuable worth worthy proper polite
        patient patiently curious interesting amazing surprise surprised pleased please
        enjoy enjoyed enjoying enjoys like liked likes welcome welcomed keen eager lively
        bouncy busy quick quickly swift swiftly nimble clever skilful skillful handy hearty
        full fed fat plump round ripe green golden silver shiny smart wiser stronger bigger
        tall grand grandly royal precious special favourite favorite home homes cottage garden
        gardens flowers flower roses rose daisy daisies lily lilies meadow meadows field fields
        sun morning dawn daylight light lights bird birds lamb lambs kitten kittens puppy
        puppies baby babies child children cradle rock rocking lullaby hush sleep sleeping asleep
        rest rested resting gather gathered share shared sharing together united unite
        build built grow grew grown growing learn learned learning learnt know knew
        """,
    0.2: """
        keep keeps kept keeping hold holds held holding have has having own owns got get gets
        find found finds found bring brings brought give gives gave given make makes made
        go goes went come comes came stay stays stayed wait waited live lived lives living
        """,
    -0.2: """
        odd strange stranger strangely weird peculiar tired sleepy slow slowly dull grey gray
        cold colder chilly wet damp muddy dusty dirty messy noisy loud loudly rough hard harder
        hungry thirsty poor poorer small little tiny thin old older empty lost lose loses losing
        late later alone lonely leave left leaves leaving gone away fall falls fell fallen
        tumble tumbled tumbling stumble stumbled trip tripped slip slipped bump bumped drop dropped
        """,
    -0.4: """
        bad badly sad sadly sadness unhappy unkind rude naughty wicked wickedly mean meaner
        cross grumpy grumble grumbled grumbling complain complained complaining scold scolded
        scolds scolding frown frowned frowning sulk sulked whine whined wrong worse wrongly
        trouble troubles troubled worry worried worries worrying fear feared fears fearful afraid
        scared scary frightened frighten fright sorry shame shameful ashamed silly foolish fool
        fools lazy idle careless clumsy ugly nasty sour bitter stale rotten broken break breaks
        broke crack cracked crumble crumbled spill spilled spilt burn burnt burned sick sickly
        ill illness ache aches aching sore hurt hurts hurting wound wounded bruise bruised
        pain painful weep wept weeping cry cried cries crying tears tear sob sobbed sobbing
        fail failed fails failure mistake mistakes poorly harsh harshly stern strict sharp
        danger dangerous risky storm stormy thunder dark darkness gloomy gloom grim dreary
        hunger starve starved starving beg begged begging beggar beggars thief thieves steal
        stole stolen stealing chase chased greedy greed jealous jealousy envy envious proud
        boast boasted boasting lie lies lied lying liar cheat cheated cheating trick tricked
        annoy annoyed annoying anxious awkward bother bothered blame blamed bully bullied
        complaint confused confusion crooked cranky crabby dismal disappoint disappointed
        disappointing dislike disliked dizzy doubt doubted doubtful dreadfully drab drearily
        embarrassed empty fault faulty feeble fret fretted fretting fuss fussy gloomier
        grouchy guilt guilty harm harmed hateful haughty hollow homeless hopelessly impatient
        injure injured irritate irritated lame mad meanly mischief mischievous moan moaned
        moaning mope moped muddle nag nagged nagging nervous nuisance offend offended pest
        pity pitiful quarrelsome reckless regret regretted restless sadder scare scowl
        scowled shabby shiver shivered shivering shy sloppy sneaky sorrowing spoil spoiled
        spoilt stingy stubborn suffer suffered suffering sulky tease teased teasing tremble
        trembled trembling uneasy unfair unlucky unwell upset vain wasted weak weary whimper
        whimpered worn worthless yell yelled
        """,
    -0.6: """
        angry angrily anger rage raged furious fury hate hated hates hating hatred cruel cruelly
        cruelty evil vile horrid horrible horribly terrible terribly awful awfully dreadful
        dreadfully miserable misery wretched woe woeful sorrow sorrowful grief grieve grieved
        mourn mourned mourning despair hopeless helpless beat beaten beating beats whip whipped
        whipping slap slapped punch punched kick kicked hit hits smack smacked spank spanked
        fight fights fought fighting quarrel quarrels quarrelled quarreling war wars enemy
        enemies attack attacked threat threaten threatened scream screamed screaming shriek
        shrieked howl howled wail wailed betray betrayed abandon abandoned neglect neglected
        prison jail locked chained chain chains cage caged trap trapped punish punished punishment
        poison poisoned wolf wolves monster monsters witch witches ghost ghosts giant ogre
        disgrace disgraced insult insulted mock mocked mocking ridicule sneer sneered
        """,
    -0.8: """
        kill killed kills killing murder murdered murderer dead death die died dies dying
        drown drowned drowning slay slain slew hang hanged hanging blood bloody bleed bled
        torture tortured agony doom doomed curse cursed cursing damn damned hell horror
        terror terrified tragic tragedy destroy destroyed destroying ruin ruined disaster
        grave graves corpse corpses massacre slaughter slaughtered butcher butchered
        strangle strangled stab stabbed
        """,
}

NEGATORS = {"not", "no", "never", "couldn't", "can't", "won't", "don't"}


def main(path):
    seen = {}
    for polarity, words in GROUPS.items():
        for word in words.split():
            if word in NEGATORS or word in seen:
                continue
            seen[word] = polarity
    with open(path, "w", encoding="utf-8") as out:
        out.write("# Sentiment lexicon for the heuristic encoder: token<TAB>polarity in [-1, 1].\n")
        out.write("# Hand-curated for children's verse; regenerate with tools/scripts/build_sentiment_lexicon.py.\n")
        for word in sorted(seen):
            out.write(f"{word}\t{seen[word]:+.1f}\n")
    print(f"{len(seen)} entries written to {path}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/sentiment_lexicon.tsv")
